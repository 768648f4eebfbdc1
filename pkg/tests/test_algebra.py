import pytest
from hypothesis import given, strategies as st

from knotsurg.algebra import (
    LEFT, RIGHT, Elem, NonHomogeneous, alg_mul, from_series, gradings, parse_elem, phi_sigma, phi_tau,
    render, to_series,
)
from knotsurg.coeff import IDEM0, ChiralWindow, Series, UAdic

POL = UAdic(6)

term0 = st.tuples(st.just("0"), st.integers(0, 5), st.integers(0, 5))
term1 = st.tuples(st.just("1"), st.integers(0, 5), st.integers(-3, 3))
termd = st.tuples(st.sampled_from("st"), st.integers(0, 5), st.integers(-3, 3))
anyterm = st.one_of(term0, term1, termd)


@st.composite
def elems(draw, arity=1, policy=POL):
    terms = draw(st.lists(st.tuples(*[anyterm] * arity), max_size=5))
    return Elem(arity, terms, policy)


@given(elems(), elems(), elems())
def test_associative(a, b, c):
    assert alg_mul(alg_mul(a, b), c) == alg_mul(a, alg_mul(b, c))


@given(elems(arity=2), elems(arity=2), elems(arity=2))
def test_associative_tensor_square(a, b, c):
    assert alg_mul(alg_mul(a, b), c) == alg_mul(a, alg_mul(b, c))


@given(elems(), elems(), elems())
def test_distributive(a, b, c):
    assert alg_mul(a, b + c) == alg_mul(a, b) + alg_mul(a, c)


@st.composite
def idem0_series(draw):
    return Series(IDEM0, draw(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=4)), POL)


@given(idem0_series(), idem0_series())
def test_phi_maps_are_multiplicative(a, b):
    for phi in (phi_sigma, phi_tau):
        assert phi(a * b) == phi(a) * phi(b)


@given(idem0_series())
def test_sigma_tau_commutation(a):
    e = from_series(a)
    for kind, phi in (("s", phi_sigma), ("t", phi_tau)):
        d = Elem(1, [((kind, 0, 0),)], POL)
        assert alg_mul(d, e) == alg_mul(from_series(phi(a)), d)


def test_idempotent_mismatch_is_zero():
    s = Elem(1, [(("s", 0, 0),)], POL)
    assert not alg_mul(s, s)
    assert alg_mul(Elem.idem((1,), POL), s) == s
    assert alg_mul(s, Elem.idem((0,), POL)) == s


@given(elems(arity=2))
def test_render_parse_roundtrip(a):
    if not a:
        return
    ends = lambda t: (tuple(LEFT[x[0]] for x in t), tuple(RIGHT[x[0]] for x in t))
    left, right = ends(min(a.terms))
    e = Elem(2, [t for t in a.terms if ends(t) == (left, right)], POL)
    assert parse_elem(render(e), left, right, POL) == e


def test_parse_parenthesised_factor():
    e = parse_elem("(s + T^2*t) | 1", (1, 0), (0, 0), POL)
    assert len(e) == 2
    with pytest.raises(ValueError):
        parse_elem("s*U", (1,), (0,), POL)
    with pytest.raises(ValueError):
        parse_elem("s", (0,), (0,), POL)


def test_gradings_are_additive():
    a = Elem(1, [(("0", 1, 2),)], POL)
    b = Elem(1, [(("0", 2, 0),)], POL)
    ga, gb, gab = gradings(a), gradings(b), gradings(alg_mul(a, b))
    assert gab == tuple(x + y for x, y in zip(ga, gb))
    assert isinstance(gradings(a + b)[0], NonHomogeneous)


def test_series_roundtrip_and_chiral_truncation():
    s = Series(IDEM0, [(0, 1), (2, 0)], POL)
    assert to_series(from_series(s)) == s
    e = Elem(1, [(("0", 0, 3),)], ChiralWindow(2, 6))
    assert not e
