from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from knotsurg import localmodel as lm
from knotsurg.localmodel import (
    END_COMPLEXES, EndComplex, FloerElement, Kit, SpaceMismatch, UnknownComposition,
    WindowUnderflow, delta, elementary, end_algebra_homology, eta_sigma, fe, local_min_level,
    local_pieces, local_triangle_stable, mu, mu1, retraction_check, sampled_induced_mu3,
    verify_local_triangle,
)

W, N = 6, 6
KIT = Kit(W, N)


def test_shift_operators_invert_on_interior():
    k = KIT
    for a, b, idn in ((k.V, k.Vi, k.id0), (k.Uc, k.Uci, k.id0), (k.T, k.Ti, k.id1)):
        assert not (a @ b).residue(idn)
        assert not (b @ a).residue(idn)


def test_curly_product_is_u():
    k = KIT
    assert not (k.Uc @ k.V).residue(k.id0.upow(1))
    assert not (k.V @ k.Uc).residue(k.id0.upow(1))


def test_phi_maps_are_cycles():
    D = fe("b0", "b1", sigma_p=KIT.ps, tau_p=KIT.pt)
    assert not mu1(D, KIT).residue()


def test_mu1_example():
    x = fe("b0", "b0'", theta_p=delta(1, W, N))
    want = fe("b0", "b0'", theta_m=delta(1, W, N) + delta(2, W, N))
    assert not mu1(x, KIT).residue(want)


@pytest.mark.parametrize("W,N", [(6, 6), (10, 8)])
def test_local_triangle(W, N):
    rep = verify_local_triangle(W, N)
    assert len(rep.checks) == 12
    assert rep.ok, [c.name for c in rep.checks if not c.ok]
    assert local_triangle_stable(W, N)
    assert local_min_level(W, N) >= 0


def test_underflow():
    with pytest.raises(WindowUnderflow):
        verify_local_triangle(3, 6)
    with pytest.raises(WindowUnderflow):
        retraction_check(3, 6)


def test_perturbed_eta_is_detected():
    pc = local_pieces(KIT)
    bad = eta_sigma(KIT) + elementary("E1", "E0", 0, 0, 1, W, N)
    Z = fe("b1", "b0'", sigma_p=bad, tau_p=pc["Z"].terms["tau+"])
    assert mu1(Z, KIT).residue(pc["Y"])
    assert not mu1(pc["Z"], KIT).residue(pc["Y"])


class Flipped(EndComplex):
    def split(self, a):
        return not super().split(a)


@pytest.mark.parametrize("name", ["00", "sigma", "tau", "11"])
def test_homotopy_identity_holds_for_either_split(name):
    # the identity alone does not pin down the split
    cx = {c.name: c for c in END_COMPLEXES}[name]
    assert not lm._retraction_failures(cx, KIT, lm.MARGIN)
    assert not lm._retraction_failures(Flipped(cx.name, cx.src, cx.dst), KIT, lm.MARGIN)


@pytest.mark.parametrize("name", ["sigma", "tau"])
def test_flipped_split_leaves_filtration(name):
    cx = {c.name: c for c in END_COMPLEXES}[name]
    gens = list(cx.elementary(KIT, lm.MARGIN + 2))
    assert not lm._unfiltered_h(cx, KIT, gens, lm.MARGIN)
    fl = Flipped(cx.name, cx.src, cx.dst)
    assert lm._unfiltered_h(fl, KIT, gens, lm.MARGIN)


def test_flipped_split_breaks_index_vanishing():
    cx = {c.name: c for c in END_COMPLEXES}["00"]
    gens = list(cx.elementary(KIT, lm.MARGIN + 2))
    assert lm._h1_ok(cx, KIT, gens)
    assert not lm._h1_ok(Flipped(cx.name, cx.src, cx.dst), KIT, gens)


elementaries = st.tuples(
    st.sampled_from(END_COMPLEXES),
    st.lists(st.tuples(st.integers(-2, 2), st.integers(-1, 1), st.integers(0, 3)), min_size=1, max_size=4),
)


@given(elementaries)
@settings(max_examples=30, deadline=None)
def test_homotopy_inverts_differential(data):
    cx, parts = data
    f = lm.WindowedOperator(cx.src, cx.dst, W, N)
    for a, db, e in parts:
        f = f + elementary(cx.src, cx.dst, a, a + db, e, W, N)
    h = cx.h(KIT, f)
    assert not (cx.conj(KIT, h) + h).residue(f)


def test_end_algebra_homology():
    rows = end_algebra_homology(W, N)
    assert [r.complex for r in rows] == ["00", "sigma", "tau", "11"]
    assert all(r.ok for r in rows)
    assert {r.basis_size for r in rows} == {30}


def test_retraction():
    rep = retraction_check(W, N)
    assert rep.ok, [c.name for c in rep.checks if not c.ok]


def test_induced_mu3_vanishes():
    out = sampled_induced_mu3(W, N)
    assert out and all(not r for _, r in out)


def test_floer_element_validation():
    with pytest.raises(ValueError):
        fe("b0", "b1", theta_p=KIT.ps)
    with pytest.raises(SpaceMismatch):
        fe("b0", "b1", sigma_p=KIT.id0)
    with pytest.raises(SpaceMismatch):
        KIT.V @ KIT.T
    with pytest.raises(SpaceMismatch):
        mu([fe("b0", "b1", sigma_p=KIT.ps), fe("b0", "b1", sigma_p=KIT.ps)], KIT)


def test_unknown_composition_raises():
    x = fe("b0", "b0'", theta_m=KIT.id0)
    y = fe("b0'", "b0''", theta_m=KIT.id0)
    with pytest.raises(UnknownComposition):
        mu([x, y], KIT)


def test_top_degree_products_vanish():
    xs = [fe("b0", "b0'", theta_p=KIT.id0), fe("b0'", "b0''", theta_p=KIT.id0),
          fe("b0''", "b0'''", theta_p=KIT.id0)]
    assert not mu(xs, KIT).terms
