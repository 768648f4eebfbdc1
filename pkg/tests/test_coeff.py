import pytest
from hypothesis import given, settings, strategies as st

from knotsurg.coeff import (
    IDEM0, IDEM1, PLAINU, ChiralWindow, Indivisible, NotAUnit, Policy, Series, UAdic,
    divide, invert, is_unit, parse_series, render, unit_check,
)

POLICIES = [UAdic(6), ChiralWindow(4, 6)]


def monos(ring):
    if ring == IDEM0:
        return st.tuples(st.integers(0, 7), st.integers(0, 7))
    if ring == IDEM1:
        return st.tuples(st.integers(0, 7), st.integers(-4, 4))
    return st.tuples(st.integers(0, 7))


@st.composite
def series(draw, ring=None, policy=None):
    ring = ring or draw(st.sampled_from([IDEM0, IDEM1, PLAINU]))
    pol = policy or draw(st.sampled_from(POLICIES))
    return Series(ring, draw(st.lists(monos(ring), max_size=6)), pol)


@st.composite
def triple(draw):
    ring = draw(st.sampled_from([IDEM0, IDEM1, PLAINU]))
    pol = draw(st.sampled_from(POLICIES))
    return tuple(draw(series(ring, pol)) for _ in range(3))


@given(triple())
def test_ring_axioms(t):
    a, b, c = t
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + a == Series.zero(a.ring, a.policy)
    assert a * Series.one(a.ring, a.policy) == a


@given(triple())
def test_truncation_commutes_with_products(t):
    a, b, _ = t
    wide = Policy(a.policy.mode, 20, None if a.policy.W is None else 20)
    lhs = (a.with_policy(wide) * b.with_policy(wide)).with_policy(a.policy)
    assert lhs == a * b


@given(series())
def test_inverse(a):
    if is_unit(a):
        assert a * invert(a) == Series.one(a.ring, a.policy)
    else:
        with pytest.raises(NotAUnit):
            invert(a)


@given(series(ring=PLAINU))
def test_one_plus_u_r_is_unit(r):
    one = Series.one(PLAINU, r.policy)
    a = one + Series.mono(PLAINU, r.policy, 1) * r
    assert a * invert(a) == one


@given(triple())
def test_division_recovers_quotient(t):
    a, b, _ = t
    if not b:
        return
    q = divide(a * b, b)
    assert not isinstance(q, Indivisible)
    assert q * b == a * b


def test_indivisible_reports_level():
    p = UAdic(8)
    one = Series.one(PLAINU, p)
    u = Series.mono(PLAINU, p, 1)
    r = divide(one, u)
    assert isinstance(r, Indivisible) and not r and r.level == 0


@given(series())
def test_render_parse_roundtrip(a):
    assert parse_series(a.ring, render(a), a.policy) == a


def test_policy_validation():
    with pytest.raises(ValueError):
        Policy("other", 4)
    with pytest.raises(ValueError):
        Policy("uadic", 0)
    with pytest.raises(ValueError):
        Policy("chiral", 4)
    assert str(ChiralWindow(3, 5)) == "chiral W=3 N=5"


def test_chiral_window_drops_large_curly_powers():
    p = ChiralWindow(2, 8)
    assert not Series(IDEM0, [(0, 3)], p)
    assert Series(IDEM0, [(0, 3)], UAdic(8))


def test_unit_criteria():
    p = UAdic(4)
    assert unit_check(Series(IDEM1, [(0, 3), (1, 0)], p)) is None
    assert unit_check(Series(IDEM1, [(0, 3), (0, 1)], p)) is not None
    assert unit_check(Series(IDEM0, [(0, 0), (0, 1)], ChiralWindow(2, 4))) is None
    assert unit_check(Series(IDEM0, [(0, 1)], ChiralWindow(2, 4))) is not None
