import pytest
from hypothesis import given, settings, strategies as st

from knotsurg.coeff import ChiralWindow, UAdic
from knotsurg.interchange import ParseError, emit, load, parse
from knotsurg.modules import ValidationFailed, tensor
from knotsurg.zoo import make_dinfty, make_dn, preset_knot

CASES = {
    "d3": lambda: make_dn(3),
    "dinfty": lambda: make_dinfty(),
    "trefoil": lambda: preset_knot("trefoil", 2, UAdic(16)),
    "d2xd3": lambda: tensor(make_dn(2, UAdic(8)), make_dn(3, UAdic(8))),
    "chiral_dm2": lambda: make_dn(-2, ChiralWindow(6, 8)),
}


def same(a, b):
    return (a.gens == b.gens and a.arrows == b.arrows and a.arity == b.arity
            and a.framing == b.framing and str(a.policy) == str(b.policy))


@pytest.mark.parametrize("name", CASES)
def test_roundtrip(name):
    m = CASES[name]()
    text = emit(m)
    back = parse(text).module
    assert same(m, back)
    assert emit(back) == text


def test_roundtrip_through_file(tmp_path):
    m = make_dinfty()
    p = tmp_path / "dinfty.ksd"
    p.write_text(emit(m))
    assert same(load(str(p)).module, m)


def test_result_block_roundtrip():
    m = make_dn(1)
    f = parse(emit(m, {"towers": "1", "warning": "no"}))
    assert f.result == {"towers": "1", "warning": "no"}


def test_bad_idempotent_position():
    lines = emit(make_dn(3)).splitlines()
    i = next(k for k, l in enumerate(lines) if l.strip().startswith("x1 ("))
    lines[i] = "  x1 (7) gr=0"
    with pytest.raises(ParseError) as exc:
        parse("\n".join(lines))
    assert (exc.value.line, exc.value.col) == (i + 1, lines[i].index("7") + 1)
    assert str(exc.value).startswith(f"line {i + 1}, col ")


@pytest.mark.parametrize("text", [
    "format: 9\narity: 1\n",
    "arity: 1\npolicy: padic N=3\n",
    "format: 1\narity: 1\npolicy: uadic N=4\ngenerators:\n  x0 (0) gr=zero\n",
    "format: 1\narity: 1\npolicy: uadic N=4\ngenerators:\n  x0 (0)\ndelta1:\n  x0 -> y9 : s\n",
])
def test_malformed_inputs_raise(text):
    with pytest.raises(ParseError):
        parse(text)


def test_perturbed_module_rejected_on_load():
    text = emit(make_dinfty())
    lines = text.splitlines()
    i = next(k for k, l in enumerate(lines) if l.strip().startswith("x0- -> z1-"))
    del lines[i]
    bad = "\n".join(lines)
    with pytest.raises(ValidationFailed) as exc:
        parse(bad)
    assert "x0+" in str(exc.value) and "z1-" in str(exc.value)
    assert parse(bad, check=False).module is not None


@given(st.integers(-6, 6), st.integers(2, 20))
@settings(max_examples=30, deadline=None)
def test_roundtrip_property(n, N):
    m = make_dn(n, UAdic(N))
    assert same(parse(emit(m)).module, m)
