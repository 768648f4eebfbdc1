import pytest
from hypothesis import given, strategies as st

from knotsurg.cube import DOT, CubeGen, MultiU, SurgeryComplex, icompose, madd, mcompose
from knotsurg.homology import homology
from knotsurg.surgery import glue, knot_surgery
from knotsurg.zoo import make_dn, preset_knot

N = 6


def multis(r):
    return st.lists(st.tuples(*[st.integers(0, 4)] * r), max_size=5).map(lambda ts: MultiU(ts, N))


@given(st.integers(1, 3).flatmap(lambda r: st.tuples(multis(r), multis(r), multis(r))))
def test_multiu_ring(t):
    a, b, c = t
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert not (a + a)


@given(st.integers(1, 3).flatmap(lambda r: st.tuples(multis(r), multis(r))))
def test_identify_is_a_ring_map(t):
    from knotsurg._kernel_py import clmul
    a, b = t
    assert (a + b).identify() == a.identify() ^ b.identify()
    assert (a * b).identify() == clmul(a.identify(), b.identify(), N)


def test_negative_powers_rejected():
    with pytest.raises(AssertionError):
        MultiU([(-1,)], N)


def test_arrow_must_respect_cube():
    g = [CubeGen("a", (1,), (0,)), CubeGen("b", (0,), (0,))]
    with pytest.raises(AssertionError):
        SurgeryComplex(g, {("a", "b"): {("+",): MultiU.mono((0,), N)}}, 1, N)
    g = [CubeGen("a", (0,), (0,)), CubeGen("b", (1,), (0,))]
    with pytest.raises(AssertionError):
        SurgeryComplex(g, {("a", "b"): {(DOT,): MultiU.mono((0,), N)}}, 1, N)


@pytest.mark.parametrize("c", [
    knot_surgery(make_dn(2), 6, 16),
    knot_surgery(preset_knot("T(3,4)", -1), 8, 16),
    glue(make_dn(1), make_dn(2), 6, 16),
], ids=["D2", "T34", "glue"])
def test_vertex_differentials_square_to_zero(c):
    d0 = c.filtered(lambda p: all(ch == DOT for ch in p))
    assert not mcompose(d0, d0)
    assert not c.square_residue()


def test_map_algebra():
    f = {("a", "b"): MultiU.mono((1,), N)}
    g = {("b", "c"): MultiU.mono((2,), N)}
    assert mcompose(g, f) == {("a", "c"): MultiU.mono((3,), N)}
    assert madd(f, f) == {}
    assert icompose({("b", "c"): 0b10}, {("a", "b"): 0b11}, N) == {("a", "c"): 0b110}


def test_free_reduction_preserves_homology():
    c = knot_surgery(preset_knot("trefoil", 2), 8, 16)
    r = c.reduce()
    assert r.verify() == []
    assert len(r.reduced) < len(c)
    assert homology(r.reduced).summary() == homology(c).summary()
