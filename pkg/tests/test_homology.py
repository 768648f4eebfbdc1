import pytest
from hypothesis import given, settings, strategies as st

from knotsurg import _kernel_py
from knotsurg.cube import reduce_free
from knotsurg.homology import (
    BACKEND, ClassMismatch, FreeComplex, _compiled, betti_at_u0, homology, tower_generator_check,
)
from knotsurg.surgery import knot_surgery, unknot_plus_one_cycle
from knotsurg.zoo import make_dn, preset_knot

N = 12
BACKENDS = ["python"] + (["cython"] if _compiled is not None else [])


def mat_mul(A, B):
    out = {}
    for (i, k), a in A.items():
        for (k2, j), b in B.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), 0) ^ _kernel_py.clmul(a, b, N)
    return {k: v for k, v in out.items() if v}


def unitriangular_inverse(P, n):
    # P = 1 + L with L strictly lower triangular, so P^-1 = sum (-L)^k
    L = {k: v for k, v in P.items() if k[0] != k[1]}
    inv = {(i, i): 1 for i in range(n)}
    term = dict(inv)
    for _ in range(n):
        term = mat_mul(L, term)
        if not term:
            break
        for k, v in term.items():
            inv[k] = inv.get(k, 0) ^ v
    return {k: v for k, v in inv.items() if v}


@st.composite
def scrambled(draw):
    """A direct sum of towers and torsion pairs U^k, conjugated by a random
    grading-preserving unitriangular change of basis.

    Returns (complex, towers, torsion orders).
    """
    towers = draw(st.integers(0, 3))
    tors = draw(st.lists(st.integers(0, N - 2), max_size=4))
    gr = [draw(st.integers(-4, 4)) for _ in range(towers)]
    D = {}  # D[(dst, src)]
    for k in tors:
        g = draw(st.integers(-4, 4))
        s, t = len(gr), len(gr) + 1
        gr += [g, g - 1 + 2 * k]
        D[(t, s)] = 1 << k
    n = len(gr)
    P = {(i, i): 1 for i in range(n)}
    for i in range(n):
        for j in range(i):
            diff = gr[i] - gr[j]
            if diff >= 0 and diff % 2 == 0 and diff // 2 < N and draw(st.booleans()):
                P[(i, j)] = 1 << diff // 2
    Dp = mat_mul(mat_mul(P, D), unitriangular_inverse(P, n))
    fc = FreeComplex([f"g{i}" for i in range(n)], {(s, t): m for (t, s), m in Dp.items()}, N, gr)
    return fc, towers, tors


@given(scrambled())
@settings(max_examples=60, deadline=None)
def test_scrambled_complexes(data):
    fc, towers, tors = data
    assert not fc.square_residue()
    for b in BACKENDS:
        r = homology(fc, b)
        assert r.tower_count == towers
        assert r.torsion_orders == sorted(k for k in tors if k > 0)


@given(scrambled())
@settings(max_examples=40, deadline=None)
def test_backends_agree_exactly(data):
    fc = data[0]
    ent = [(s, t, m) for (s, t), m in sorted(fc.entries.items())]
    ref = _kernel_py.eliminate(len(fc), ent, N)
    if _compiled is not None:
        out = _compiled.eliminate(len(fc), list(ent), N)
        assert [tuple(x) for x in out[0]] == [tuple(x) for x in ref[0]]
        assert list(out[1]) == list(ref[1])


@given(scrambled())
@settings(max_examples=40, deadline=None)
def test_reduction_is_a_homotopy_equivalence(data):
    fc = data[0]
    red = reduce_free(fc)
    assert red.verify() == []
    assert homology(red.reduced).summary() == homology(fc).summary()


def test_unit_inverse():
    for u in range(1, 1 << 8, 2):
        assert _kernel_py.clmul(u, _kernel_py.unit_inverse(u, 8), 8) == 1


def test_precision_warning_at_top_order():
    fc = FreeComplex(["a", "b"], {(0, 1): 1 << 5}, 6)
    r = homology(fc)
    assert r.torsion_orders == [5] and r.warning
    assert not homology(FreeComplex(["a", "b"], {(0, 1): 1 << 4}, 6)).warning


def test_classes_must_not_mix():
    fc = FreeComplex(["a", "b"], {(0, 1): 1}, 4, classes=[0, 1])
    with pytest.raises(ClassMismatch):
        homology(fc)


def test_betti_at_u0_matches_structure():
    # each torsion summand F[U]/U^k leaves two generators mod U
    c = knot_surgery(preset_knot("trefoil", -1), 8, 16)
    r = homology(c)
    assert sum(betti_at_u0(c).values()) == r.tower_count + 2 * len(r.torsion_orders)
    assert r.dim_mod_u() == r.tower_count + len(r.torsion_orders)


def test_plus_one_tower_generator():
    c = knot_surgery(make_dn(1), 8, 16)
    assert tower_generator_check(c, unknot_plus_one_cycle(c, 8))
    z = unknot_plus_one_cycle(c, 8)
    broken = {k: v << 1 for k, v in z.items()}
    assert not tower_generator_check(c, broken)


def test_default_backend_is_reported():
    assert homology(knot_surgery(make_dn(2), 6, 8)).backend == BACKEND
