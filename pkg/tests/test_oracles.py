"""The frozen acceptance values agree with the independent oracles."""

from fractions import Fraction

import pytest

from knotsurg.acceptance import TREFOIL_HOMOLOGY, UNKNOT_HOMOLOGY

import oracles as O


@pytest.mark.parametrize("n", sorted(UNKNOT_HOMOLOGY))
def test_unknot_frozen_values(n):
    assert O.cone_homology(n, O.unknot_V) == UNKNOT_HOMOLOGY[n]


@pytest.mark.parametrize("n", sorted(TREFOIL_HOMOLOGY))
def test_trefoil_frozen_values(n):
    assert O.cone_homology(n, O.trefoil_V) == TREFOIL_HOMOLOGY[n]


def test_trefoil_v_from_staircase():
    V = O.v_function((1, 1))
    assert [V(s) for s in range(-2, 3)] == [O.trefoil_V(s) for s in range(-2, 3)]


def test_cone_stable_under_truncation():
    for n in (-3, 1, 4):
        assert O.cone_homology(n, O.trefoil_V, 8) == O.cone_homology(n, O.trefoil_V, 14)


def test_lens_closed_form_small_cases():
    assert O.lens_d_closed(1, 0) == 0
    assert [O.lens_d_closed(2, i) for i in range(2)] == [Fraction(1, 4), Fraction(-1, 4)]
    assert [O.lens_d_closed(3, i) for i in range(3)] == [Fraction(1, 2), Fraction(-1, 6), Fraction(-1, 6)]


def test_lens_sum_vanishes_with_symmetry():
    for p in range(1, 9):
        d = [O.lens_d_closed(p, i) for i in range(p)]
        assert d == [d[(-i) % p] for i in range(p)]


def test_diagonalize_against_known_smith_form():
    # [[x, 0], [0, x^2]] and a mixed 2x2 with invariant factors 1, x^3
    assert sorted(O.diagonalize([[0b10, 0], [0, 0b100]])) == [0b10, 0b100]
    d = O.diagonalize([[0b1, 0b10], [0b10, 0b1000 ^ 0b100]])
    assert len(d) == 2 and min(O.pdeg(x) for x in d) == 0


def test_division_oracle_remultiplies():
    S = O.n_summands(8)
    num = {(0, 0)} ^ O.alpha_terms(S)
    q = O.div_one_plus(num, 1, 8)
    back = q ^ {(a, b + 1) for a, b in q}
    assert {t for t in back if min(t) < 8} == {t for t in num if min(t) < 8}
