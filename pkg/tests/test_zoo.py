import pytest
from hypothesis import given, settings, strategies as st

from knotsurg.coeff import ChiralWindow, UAdic
from knotsurg.modules import find_isomorphism, reduce, validate
from knotsurg.zoo import (
    PRESETS, StaircaseSpec, idem0_betti, make_dinfty, make_dinfty_twisted, make_dn,
    make_staircase_knot, phi_bimodule, preset_knot, staircase_cfk,
)
from oracles import staircase_alexander


@pytest.mark.parametrize("pol", [UAdic(4), UAdic(16), ChiralWindow(8, 16)], ids=str)
@pytest.mark.parametrize("n", range(-3, 4))
def test_solid_tori_valid(n, pol):
    assert validate(make_dn(n, pol)) is None


@pytest.mark.parametrize("m", [1, 2, 3])
def test_twisted_dinfty_valid(m):
    assert validate(make_dinfty_twisted(m)) is None
    with pytest.raises(ValueError):
        make_dinfty_twisted(0)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_phi_on_solid_torus(p, n, m):
    out = phi_bimodule(n, m).apply(make_dn(p))
    assert out.same_structure(make_dn(p * m + n))
    assert out.framing == p * m + n


@pytest.mark.parametrize("m", [1, 2, 3])
def test_phi_on_dinfty_chiral(m):
    pol = ChiralWindow(8, 8)
    red = reduce(phi_bimodule(1, m).apply(make_dinfty(pol))).reduced
    assert find_isomorphism(red, make_dinfty_twisted(m, pol)) is not None


def test_phi_identity_is_identity():
    for m in (make_dn(2), make_dinfty(), preset_knot("trefoil", 1)):
        assert phi_bimodule(0, 1).apply(m).arrows == m.arrows


@pytest.mark.parametrize("name,steps", list(PRESETS.items()))
def test_staircase_alexander_gradings(name, steps):
    cfk, _ = staircase_cfk(steps)
    assert [a for a, _ in cfk] == staircase_alexander(steps)
    # the top generator sits in Maslov grading 0
    assert cfk[0][1] == 0


@pytest.mark.parametrize("name", list(PRESETS))
@pytest.mark.parametrize("framing", [-2, 0, 3])
def test_presets_valid(name, framing):
    k = preset_knot(name, framing)
    assert validate(k) is None
    assert k.framing == framing


def test_unknot_staircase_is_solid_torus():
    for n in range(-5, 6):
        assert make_staircase_knot(StaircaseSpec((), n)).same_structure(make_dn(n))


def test_idem0_betti_is_rank_of_hfk_hat():
    # rank of HFK-hat for a staircase equals its number of generators
    assert {k: idem0_betti(preset_knot(k, 0)) for k in PRESETS} == {
        "unknot": 1, "trefoil": 3, "T(2,5)": 5, "T(3,4)": 5, "T(2,7)": 7}


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset_knot("figure8", 0)
