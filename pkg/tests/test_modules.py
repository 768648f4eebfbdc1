import pytest
from hypothesis import given, settings, strategies as st

from knotsurg.algebra import Elem
from knotsurg.coeff import ChiralWindow, UAdic
from knotsurg.modules import (
    DMorphism, Generator, NotACycle, TypeDModule, ValidationFailed, compose, cone, find_isomorphism,
    identity, is_minimal, morphism_differential, positivity_violations, reduce, tensor, validate,
)
from knotsurg.surgery import knot_surgery
from knotsurg.zoo import PRESETS, make_dinfty, make_dinfty_twisted, make_dn, preset_knot

POLS = [UAdic(8), ChiralWindow(6, 8)]


def drop(m, key):
    arr = {k: e for k, e in m.arrows.items() if k != key}
    return TypeDModule(m.gens, arr, m.policy, m.arity, m.framing, m.name)


@pytest.mark.parametrize("pol", POLS, ids=str)
def test_dinfty_valid_and_every_single_deletion_detected(pol):
    m = make_dinfty(pol)
    assert validate(m) is None
    caught = [validate(drop(m, k)) is not None for k in m.arrows]
    assert sum(caught) >= len(m.arrows) - 1


def test_violation_names_pair():
    v = validate(drop(make_dinfty(), ("x0-", "z1-")))
    assert v is not None and (v.src, v.dst) == ("x0+", "z1-")
    assert "delta^2" in str(v)


@given(st.integers(-4, 4), st.integers(-4, 4))
@settings(max_examples=20, deadline=None)
def test_tensor_of_solid_tori_is_valid(n, m):
    t = tensor(make_dn(n, UAdic(6)), make_dn(m, UAdic(6)))
    assert t.arity == 2 and t.framing == (n, m)
    assert validate(t) is None


@pytest.mark.parametrize("name", list(PRESETS))
def test_reduction_identities_on_presets(name):
    r = reduce(preset_knot(name, 1))
    assert r.verify() == []
    assert is_minimal(r.reduced)
    assert validate(r.reduced) is None


def test_reduce_dinfty_chiral_gives_two_generators():
    pol = ChiralWindow(8, 16)
    red = reduce(make_dinfty(pol)).reduced
    assert find_isomorphism(red, make_dinfty_twisted(1, pol)) is not None


def test_reduce_dinfty_uadic_is_fixed():
    m = make_dinfty(UAdic(16))
    assert reduce(m).reduced.same_structure(m)


def test_identity_is_a_cycle_and_composes():
    m = preset_knot("trefoil", 0)
    i = identity(m)
    assert not morphism_differential(i)
    assert compose(i, i).comps == i.comps


def test_cone_of_identity_reduces_to_nothing():
    m = make_dn(2, UAdic(8))
    a = m.renamed(lambda s: "a" + s)
    b = m.renamed(lambda s: "b" + s)
    comps = {(s, "b" + s[1:]): e for (s, _), e in identity(a).comps.items()}
    c = cone(DMorphism(a, b, comps))
    assert validate(c) is None
    assert len(reduce(c).reduced.gens) == 0


def test_cone_rejects_non_cycle():
    a = make_dn(1, UAdic(8)).renamed(lambda s: "a" + s)
    b = make_dn(2, UAdic(8)).renamed(lambda s: "b" + s)
    f = DMorphism(a, b, {("ax0", "bx0"): Elem.idem((0,), a.policy)})
    with pytest.raises(NotACycle):
        cone(f)


def test_constructor_errors():
    pol = UAdic(4)
    g = [Generator("a", (0,)), Generator("a", (1,))]
    with pytest.raises(ValueError):
        TypeDModule(g, {}, pol)
    g = [Generator("a", (0,)), Generator("b", (0,))]
    with pytest.raises(Exception):
        TypeDModule(g, {("a", "b"): Elem(1, [(("s", 0, 0),)], pol)}, pol)
    with pytest.raises(ValueError):
        TypeDModule(g, {("a", "b"): Elem.idem((0,), UAdic(5))}, pol)


def test_positivity_everywhere():
    for m in [make_dinfty(), preset_knot("T(3,4)", -2), tensor(make_dn(1), make_dn(-1))]:
        assert positivity_violations(m) == []
        r = reduce(m)
        for part in (r.reduced, r.incl, r.proj, r.htpy):
            assert positivity_violations(part) == []


def test_box_tensor_squares_to_zero():
    for m in (make_dn(3), preset_knot("trefoil", 2), make_dn(-2, ChiralWindow(8, 16))):
        assert not knot_surgery(m, 6, 16).square_residue()


def test_staircase_rejects_bad_specs():
    from knotsurg.zoo import StaircaseSpec, make_staircase_knot
    for steps in ((1,), (1, 2), (0, 0)):
        with pytest.raises(ValidationFailed):
            make_staircase_knot(StaircaseSpec(steps, 0))
