import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from knotsurg.homology import homology
from knotsurg.modules import tensor
from knotsurg.surgery import (
    DegenerateFraming, alexander_violations, assign_gradings, d_invariants, det, glue,
    grading_violations, h1_report, inverse, knot_surgery, lens_d, link_surgery, signature,
    spinc_label, sublink_extract,
)
from knotsurg.zoo import PRESETS, make_dn, preset_knot
from oracles import cone_homology, lens_d_closed, surgery_d, v_function


def hsig(c):
    r = homology(c)
    return r.tower_count, tuple(r.torsion_orders)


@pytest.mark.parametrize("name", list(PRESETS))
@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2, 3])
def test_surgery_matches_mapping_cone_oracle(name, n):
    assert hsig(knot_surgery(preset_knot(name, n), 8, 16)) == cone_homology(n, v_function(PRESETS[name]))


@pytest.mark.parametrize("name", ["unknot", "trefoil", "T(2,5)", "T(3,4)"])
@pytest.mark.parametrize("p", [-3, -1, 1, 2, 3])
def test_d_invariants_match_oracle(name, p):
    c = assign_gradings(knot_surgery(preset_knot(name, p), 8, 16), [[p]])
    assert grading_violations(c) == []
    got = d_invariants(c).d_levels
    want = surgery_d(p, v_function(PRESETS[name]))
    if p > 0:
        assert {int(lab[0]) % p: v for lab, v in got.items()} == want
    else:
        assert sorted(got.values()) == sorted(want.values())


@pytest.mark.parametrize("p", range(2, 7))
def test_lens_recursion_matches_closed_form(p):
    assert [lens_d(p, 1, i) for i in range(p)] == [lens_d_closed(p, i) for i in range(p)]


def test_lens_d_conjugation_symmetry_and_periodicity():
    for p in range(2, 12):
        for q in range(1, p):
            if math.gcd(p, q) != 1:
                with pytest.raises(ValueError):
                    lens_d(p, q, 0)
                continue
            for i in range(p):
                assert lens_d(p, q, i) == lens_d(p, q, (q - 1 - i) % p)
                assert lens_d(p, q, i) == lens_d(p, q + p, i)


@pytest.mark.parametrize("n,m", [(-2, 1), (1, 1), (2, -1), (0, 3), (-1, -1)])
def test_gluing_is_connected_sum(n, m):
    for k in ("unknot", "trefoil"):
        g = glue(preset_knot(k, n), make_dn(m), 8, 16)
        assert not g.square_residue()
        assert hsig(g) == hsig(knot_surgery(preset_knot(k, n + m), 8, 16))


@pytest.mark.parametrize("n,m", [(2, 3), (1, -2), (2, 2), (-1, -1)])
def test_split_link_surgery_is_lens_sum(n, m):
    L = [[n, 0], [0, m]]
    c = link_surgery(tensor(make_dn(n), make_dn(m)), 6, 16)
    assert not c.square_residue()
    assert alexander_violations(c, L) == []
    g = assign_gradings(c, L)
    assert grading_violations(g) == []

    def lens(p):
        return [lens_d_closed(p, i) if p > 0 else -lens_d_closed(-p, i) for i in range(abs(p))]

    want = sorted(a + b for a, b in itertools.product(lens(n), lens(m)))
    assert sorted(d_invariants(g).d_levels.values()) == want


def test_h1_action_on_zero_surgery():
    c = knot_surgery(make_dn(0), 6, 16)
    rep = h1_report(c)
    assert rep.ok
    assert rep.tower_action == {("x0:A0", "x1:B0"): 1}


def test_degenerate_framing():
    c = knot_surgery(make_dn(0), 6, 16)
    with pytest.raises(DegenerateFraming):
        assign_gradings(c, [[0]])
    assert assign_gradings(c, [[0]], absolute=False)


def test_sublink_of_split_link():
    s = sublink_extract(tensor(make_dn(1), make_dn(2)), [0], 6)
    assert not s.square_residue()
    with pytest.raises(ValueError):
        sublink_extract(make_dn(1), [3])


matrices = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)
).map(lambda M: [[M[i][j] if i <= j else M[j][i] for j in range(len(M))] for i in range(len(M))])

unimodular = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.integers(-2, 2), min_size=n * n, max_size=n * n).map(
        lambda xs: [[1 if i == j else (xs[i * n + j] if i > j else 0) for j in range(n)] for i in range(n)]))


def mm(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def tr(A):
    return [list(r) for r in zip(*A)]


@given(matrices)
def test_inverse_and_det(L):
    if det(L) == 0:
        with pytest.raises(DegenerateFraming):
            inverse(L)
        return
    I = mm(L, inverse(L))
    assert I == [[Fraction(int(i == j)) for j in range(len(L))] for i in range(len(L))]


@given(matrices, unimodular)
def test_signature_congruence_invariant(L, P):
    if len(P) != len(L):
        return
    assert signature(mm(mm(P, L), tr(P))) == signature(L)
    assert det(mm(mm(P, L), tr(P))) == det(L)
    assert abs(signature(L)) <= len(L)


@given(matrices)
@settings(max_examples=40)
def test_spinc_labels_count_is_det(L):
    d = abs(det(L))
    if d == 0 or d > 30:
        return
    n = len(L)
    box = range(-8, 9) if n == 1 else range(-4, 5) if n == 2 else range(-3, 4)
    labels = {spinc_label(s, L) for s in itertools.product(box, repeat=n)}
    assert len(labels) == d
