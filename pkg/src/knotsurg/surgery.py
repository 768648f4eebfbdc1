"""Surgery complexes from type-D data: assembly, sublinks, the H_1-action
and absolute gradings for integrally framed links in S^3."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
import math

from .cube import (
    AnnotationsStripped,
    SurgeryComplex,
    icompose,
    madd,
    mcompose,
    reduce_free,
)
from .homology import HomologyReport, homology
from .modules import TypeDModule, box_tensor, tensor
from .zoo import SolidTorusA, d0_act, make_d0_type_a, make_isup


class DegenerateFraming(ValueError):
    pass


# ---------- assembly


def knot_surgery(k: TypeDModule, W: int = 8, N: int | None = None) -> SurgeryComplex:
    if k.arity != 1:
        raise ValueError(f"knot surgery needs arity 1, got {k.arity}")
    return box_tensor(k, make_d0_type_a(1), W, N)


def link_surgery(x: TypeDModule, W: int = 8, N: int | None = None) -> SurgeryComplex:
    return box_tensor(x, SolidTorusA(x.arity), W, N)


def glue(left: TypeDModule, right: TypeDModule, W: int = 8, N: int | None = None) -> SurgeryComplex:
    """Glue two knot modules along the identity-sup module and cap off."""
    if left.arity != 1 or right.arity != 1:
        raise ValueError("glue expects two arity-1 modules")
    return box_tensor(tensor(left, right), make_isup(), W, N)


@dataclass
class SublinkComplex:
    """Free complex over F[U_i, V_i] (kept factors) with complement U powers.

    Arrow coefficients are sets of exponent tuples
    ``((i_1, j_1), ..., (i_k, j_k), (u_1, ..., u_r))``.
    """

    names: list
    arrows: dict
    keep: tuple

    def square_residue(self):
        out = {}
        by = {}
        for (s, t), c in self.arrows.items():
            by.setdefault(s, []).append((t, c))
        for s, lst in by.items():
            acc = {}
            for t, c1 in lst:
                for z, c2 in by.get(t, []):
                    for a in c1:
                        for b in c2:
                            m = _mono_add(a, b)
                            acc.setdefault(z, set()).symmetric_difference_update({m})
            for z, v in acc.items():
                if v:
                    out[(s, z)] = v
        return out

    def betti_mod_all(self) -> int:
        """dim over F of H(C / all variables)."""
        n = len(self.names)
        idx = {nm: i for i, nm in enumerate(self.names)}
        rows = {}
        for (s, t), c in self.arrows.items():
            if any(_is_const(m) for m in c) and sum(_is_const(m) for m in c) % 2:
                rows[idx[s]] = rows.get(idx[s], 0) ^ (1 << idx[t])
        from .homology import _rank_gf2

        return n - 2 * _rank_gf2(list(rows.values()))


def _mono_add(a, b):
    *ka, ua = a
    *kb, ub = b
    k = tuple((x[0] + y[0], x[1] + y[1]) for x, y in zip(ka, kb))
    return k + (tuple(x + y for x, y in zip(ua, ub)),)


def _is_const(m):
    *k, u = m
    return all(i == 0 and j == 0 for i, j in k) and all(x == 0 for x in u)


def sublink_extract(x: TypeDModule, keep, W: int = 8) -> SublinkComplex:
    """Cap the factors outside ``keep`` with the solid-torus module and
    restrict the kept factors to idempotent 0."""
    keep = tuple(sorted(keep))
    if any(k < 0 or k >= x.arity for k in keep):
        raise ValueError("keep index out of range")
    comp = [k for k in range(x.arity) if k not in keep]
    a = make_d0_type_a(1)
    names, lab_of = [], {}
    for g in x.gens:
        if any(g.idem[k] != 0 for k in keep):
            continue
        opts = [()]
        for k in comp:
            sub = a.factor_basis(_factor_gen(g, k), _factor_mod(x, k), W, 0)
            opts = [o + (lab,) for o in opts for (lab, _, _, _) in sub]
        for o in opts:
            nm = g.name if not o else g.name + ":" + ",".join(f"{s}{v}" for s, v in o)
            names.append(nm)
            lab_of[(g.name, o)] = nm
    byg = {}
    for (gname, o), nm in lab_of.items():
        byg.setdefault(gname, []).append((o, nm))
    arrows = {}
    for (s, t), e in x.arrows.items():
        for o, src in byg.get(s, []):
            for term in e.terms:
                out, us = [], []
                ok = True
                for pos, k in enumerate(comp):
                    r = d0_act(term[k], o[pos])
                    if r is None:
                        ok = False
                        break
                    out.append(r[0])
                    us.append(r[1])
                if not ok:
                    continue
                dst = lab_of.get((t, tuple(out)))
                if dst is None:
                    continue
                mono = tuple((term[k][1], term[k][2]) for k in keep) + (tuple(us),)
                arrows.setdefault((src, dst), set()).symmetric_difference_update({mono})
    arrows = {k: v for k, v in arrows.items() if v}
    return SublinkComplex(names, arrows, keep)


def _factor_gen(g, k):
    return replace(g, idem=(g.idem[k],), alex=None if g.alex is None else (g.alex[k],))


class _FramingView:
    def __init__(self, fr):
        self.framing = fr


def _factor_mod(x, k):
    fr = x.framing
    if isinstance(fr, (tuple, list)):
        fr = fr[k]
    return _FramingView(fr or 0)


# ---------- H_1 action


def h1_action(c: SurgeryComplex, i: int) -> dict:
    """Sum of the arrows with ``+`` at coordinate ``i``."""
    if not c.annotated:
        raise AnnotationsStripped("orientation patterns were stripped")
    if not 0 <= i < len(c.gens[0].eps if c.gens else ()):
        raise ValueError(f"component {i} out of range")
    return c.filtered(lambda p: p[i] == "+")


def chain_map_residue(c: SurgeryComplex, f: dict) -> dict:
    D = c.total()
    return madd(mcompose(D, f), mcompose(f, D))


def _identify(f: dict) -> dict:
    out = {}
    for k, v in f.items():
        m = v.identify()
        if m:
            out[k] = m
    return out


@dataclass
class H1Report:
    chain_residue: dict
    square_null: bool
    homotopy: dict | None
    reduced_action: dict
    tower_action: dict

    @property
    def ok(self):
        return not self.chain_residue and self.square_null


def solve_null_homotopy(names, D: dict, target: dict, N: int):
    """Find H with D H + H D = target over F[U]/U^N, or None."""
    pairs = [(s, t) for s in names for t in names]
    var = {}
    for p in pairs:
        for k in range(N):
            var[(p, k)] = len(var)
    eqs = {}

    def addeq(key, v):
        eqs[key] = eqs.get(key, 0) ^ (1 << v)

    for (s, t) in pairs:
        for k in range(N):
            v = var[((s, t), k)]
            # D o H: s -> t -> z
            for (a, z), m in D.items():
                if a != t:
                    continue
                for b in range(N - k):
                    if m >> b & 1:
                        addeq((s, z, k + b), v)
            # H o D: w -> s -> t
            for (w, a), m in D.items():
                if a != s:
                    continue
                for b in range(N - k):
                    if m >> b & 1:
                        addeq((w, t, k + b), v)
    rows = []
    keys = set(eqs)
    for (s, t), m in target.items():
        for b in range(N):
            if m >> b & 1:
                keys.add((s, t, b))
    nv = len(var)
    for key in keys:
        rhs = 0
        s, t, b = key
        if target.get((s, t), 0) >> b & 1:
            rhs = 1
        rows.append(eqs.get(key, 0) | (rhs << nv))
    sol = _solve_gf2(rows, nv)
    if sol is None:
        return None
    H = {}
    for ((s, t), k), v in var.items():
        if sol >> v & 1:
            H[(s, t)] = H.get((s, t), 0) | (1 << k)
    return H


def _solve_gf2(rows, nv):
    piv = {}
    for r in rows:
        for b, pr in piv.items():
            if r >> b & 1:
                r ^= pr
        low = r & ((1 << nv) - 1)
        if not low:
            if r >> nv & 1:
                return None
            continue
        b = low.bit_length() - 1
        for b2 in list(piv):
            if piv[b2] >> b & 1:
                piv[b2] ^= r
        piv[b] = r
    sol = 0
    for b, r in piv.items():
        if r >> nv & 1:
            sol |= 1 << b
    return sol


def h1_report(c: SurgeryComplex, i: int = 0) -> H1Report:
    A = h1_action(c, i)
    res = chain_map_residue(c, A)
    red = reduce_free(c.to_free(), track=True)
    N = c.N
    Ai = _identify(A)
    Ared = red.transport(Ai)
    sq = icompose(Ared, Ared, N)
    names = list(red.reduced.names)
    D = red.d_red()
    H = solve_null_homotopy(names, D, sq, N) if sq else {}
    rep = homology(red.reduced)
    towers = [nm for cl in rep.classes.values() for nm, _ in cl.towers]
    tower_action = {(s, t): m for (s, t), m in Ared.items() if s in towers and t in towers}
    return H1Report(res, H is not None, H, Ared, tower_action)


# ---------- gradings


def _frac_matrix(L):
    return [[Fraction(x) for x in row] for row in L]


def det(L) -> Fraction:
    M = _frac_matrix(L)
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return d


def inverse(L):
    n = len(L)
    M = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(_frac_matrix(L))]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise DegenerateFraming("framing matrix is singular")
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def signature(L) -> int:
    """Signature by symmetric congruence diagonalization over Q."""
    M = _frac_matrix(L)
    n = len(M)
    diag = []
    while n:
        k = next((i for i in range(n) if M[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in range(n) for j in range(n) if M[i][j] != 0), None)
            if pair is None:
                diag += [Fraction(0)] * n
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 M_ij nonzero
            M[i] = [a + b for a, b in zip(M[i], M[j])]
            for r in range(n):
                M[r][i] += M[r][j]
            k = i
        p = M[k][k]
        diag.append(p)
        rest = [i for i in range(n) if i != k]
        M = [[M[r][c] - M[r][k] * M[k][c] / p for c in rest] for r in rest]
        n -= 1
    return sum(1 for d in diag if d > 0) - sum(1 for d in diag if d < 0)


def hnf_columns(L):
    """Lower-triangular Hermite basis of the column lattice of ``L``."""
    n = len(L)
    cols = [[int(L[r][c]) for r in range(n)] for c in range(n)]
    basis = []
    for r in range(n):
        live = [c for c in cols if c[r] != 0]
        rest = [c for c in cols if c[r] == 0]
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            a = live[0]
            nxt = [a]
            for c in live[1:]:
                q = c[r] // a[r]
                c2 = [x - q * y for x, y in zip(c, a)]
                if c2[r] != 0:
                    nxt.append(c2)
                else:
                    rest.append(c2)
            live = nxt
        if live:
            c = live[0]
            if c[r] < 0:
                c = [-x for x in c]
            basis.append((r, c))
        cols = [c for c in rest if any(c)]
    return basis


def spinc_label(s, L):
    """Reduce ``s`` modulo the column lattice of ``L``."""
    v = [Fraction(x) for x in s]
    for r, c in hnf_columns(L):
        q = math.floor(v[r] / c[r])
        v = [a - q * b for a, b in zip(v, c)]
    return tuple(v)


def _c1sq(s, L, Linv):
    n = len(L)
    v = [-2 * Fraction(s[i]) + sum(Fraction(x) for x in L[i]) for i in range(n)]
    return sum(v[i] * Linv[i][j] * v[j] for i in range(n) for j in range(n))


def grading_shift(s, eps, L, Linv=None, sig=None) -> Fraction:
    ell = len(L)
    Linv = Linv or inverse(L)
    sig = signature(L) if sig is None else sig
    return (_c1sq(s, L, Linv) - 2 * ell - 3 * sig) / 4 + ell - sum(eps)


def framing_matrix(m, linking=None):
    fr = m if isinstance(m, (tuple, list)) else (m,)
    n = len(fr)
    L = [[0] * n for _ in range(n)]
    for i in range(n):
        L[i][i] = int(fr[i])
    for (i, j), v in (linking or {}).items():
        L[i][j] = L[j][i] = int(v)
    return L


def assign_gradings(c: SurgeryComplex, L, absolute: bool = True) -> SurgeryComplex:
    """Attach absolute Maslov gradings and Spin^c labels to ``c``."""
    degenerate = det(L) == 0
    if degenerate and absolute:
        raise DegenerateFraming("absolute gradings need a nondegenerate framing matrix")
    gens = []
    if degenerate:
        for g in c.gens:
            gr = None if g.grw is None else Fraction(g.grw) - sum(g.eps)
            gens.append(replace(g, gr=gr, spinc=spinc_label(_alex_vec(g, L), L)))
        return c.with_gens(gens)
    Linv = inverse(L)
    sig = signature(L)
    for g in c.gens:
        s = _alex_vec(g, L)
        gr = None
        if g.grw is not None:
            gr = Fraction(g.grw) + grading_shift(s, g.eps, L, Linv, sig)
        gens.append(replace(g, gr=gr, spinc=spinc_label(s, L)))
    return c.with_gens(gens)


def _alex_vec(g, L):
    a = tuple(g.alex)
    if len(a) != len(L):
        raise ValueError("Alexander vector length does not match the framing matrix")
    return a


def grading_violations(c: SurgeryComplex) -> list:
    """Arrows ``U^k`` whose Maslov degree is not -1."""
    bad = []
    for (s, t), pats in c.arrows.items():
        gs, gt = c.gens[c.index[s]].gr, c.gens[c.index[t]].gr
        if gs is None or gt is None:
            continue
        for cf in pats.values():
            for mono in cf.terms:
                if gt - 2 * sum(mono) != gs - 1:
                    bad.append((s, t, mono))
    return bad


def alexander_violations(c: SurgeryComplex, L) -> list:
    """Arrows whose Alexander shift is not the sum of framing columns at the
    tau-coordinates of their pattern."""
    bad = []
    n = len(L)
    for (s, t), pats in c.arrows.items():
        a, b = c.gens[c.index[s]].alex, c.gens[c.index[t]].alex
        for p in pats:
            if p is None:
                continue
            want = [0] * len(a)
            if len(a) == n:
                for k, ch in enumerate(p):
                    if ch == "-":
                        for r in range(n):
                            want[r] += L[r][k]
            else:
                want = [sum(L[r][k] for r in range(n) for k, ch in enumerate(p) if ch == "-")]
            if [y - x for x, y in zip(a, b)] != want:
                bad.append((s, t, p))
    return bad


@dataclass
class DReport:
    report: HomologyReport
    d_levels: dict
    calibration: Fraction = Fraction(0)


def d_invariants(c: SurgeryComplex, calibration=Fraction(0)) -> DReport:
    """Top Maslov level of the towers in each Spin^c class."""
    rep = homology(c)
    lv = {lab: (None if d is None else d + calibration) for lab, d in rep.d_levels().items()}
    return DReport(rep, lv, Fraction(calibration))


def lens_d(p: int, q: int, i: int) -> Fraction:
    """Correction terms of L(p, q) by the standard recursion."""
    if p == 1:
        return Fraction(0)
    if math.gcd(p, q) != 1:
        raise ValueError(f"L({p}, {q}) needs coprime p and q")
    q %= p
    return (Fraction(-1, 4) + Fraction((2 * i + 1 - p - q) ** 2, 4 * p * q)
            - lens_d(q, p % q, i % q))


# ---------- unit vector helpers used by the CLI and tests


def tower_vector(c: SurgeryComplex, coeff_of) -> dict:
    """``{name: mask}`` with mask ``coeff_of(gen)`` (None to skip)."""
    out = {}
    for g in c.gens:
        m = coeff_of(g)
        if m:
            out[g.name] = m
    return out


def unknot_plus_one_cycle(c: SurgeryComplex, W: int) -> dict:
    """x_0 + sum_{i>=1} U^{i(i-1)/2}(x_i + x_-i) on the window."""
    N = c.N
    out = {}
    for g in c.gens:
        if g.eps != (0,):
            continue
        a = g.alex[0]
        e = abs(a) * (abs(a) - 1) // 2
        if abs(a) <= W and e < N:
            out[g.name] = 1 << e
    return out

