"""Surgery complexes: free complexes on a cube with annotated arrows.

Coefficients live in F[U_1, ..., U_r]/(U_i^N) and are stored as
:class:`MultiU` values.  Each arrow is split by an orientation pattern in
``{'+', '-', '.'}^l`` recording which components consumed sigma (``+``) or
tau (``-``).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .homology import FreeComplex
from . import _kernel_py

PLUS, MINUS, DOT = "+", "-", "."


class MultiU:
    """Truncated polynomial in r commuting U variables over GF(2)."""

    __slots__ = ("terms", "N")

    def __init__(self, terms, N):
        acc = set()
        for t in terms:
            t = tuple(t)
            if any(e < 0 for e in t):
                raise AssertionError(f"negative U-power {t}")
            if all(e < N for e in t):
                if t in acc:
                    acc.discard(t)
                else:
                    acc.add(t)
        self.terms = frozenset(acc)
        self.N = N

    @classmethod
    def mono(cls, exps, N):
        return cls([tuple(exps)], N)

    def __add__(self, other):
        m = MultiU.__new__(MultiU)
        m.terms = self.terms ^ other.terms
        m.N = self.N
        return m

    def __mul__(self, other):
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(tuple(x + y for x, y in zip(a, b)))
        return MultiU(out, self.N)

    def __eq__(self, other):
        return isinstance(other, MultiU) and self.terms == other.terms and self.N == other.N

    def __hash__(self):
        return hash((self.terms, self.N))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"MultiU({self.render()})"

    def render(self):
        if not self.terms:
            return "0"
        out = []
        for t in sorted(self.terms, key=lambda t: (sum(t), t)):
            parts = [f"u{i + 1}^{e}" if len(t) > 1 else f"u^{e}" for i, e in enumerate(t) if e]
            out.append("*".join(parts) or "1")
        return " + ".join(out)

    def identify(self) -> int:
        """Bitmask in F[U]/U^N after setting every U_i equal to U."""
        m = 0
        for t in self.terms:
            s = sum(t)
            if s < self.N:
                m ^= 1 << s
        return m

    def min_level(self):
        return min((sum(t) for t in self.terms), default=None)


@dataclass(frozen=True)
class CubeGen:
    name: str
    eps: tuple
    alex: tuple
    grw: Fraction | None = None
    gr: Fraction | None = None
    spinc: object = None


class AnnotationsStripped(ValueError):
    pass


class SurgeryComplex:
    """Free complex on a cube; arrows ``(src, dst) -> {pattern: MultiU}``."""

    def __init__(self, gens, arrows, nvars: int, N: int, annotated: bool = True):
        self.gens = list(gens)
        self.index = {g.name: k for k, g in enumerate(self.gens)}
        self.nvars = nvars
        self.N = N
        self.annotated = annotated
        self.arrows = {}
        for (s, t), pats in arrows.items():
            for p, c in pats.items():
                self.add(s, t, p, c)

    def add(self, s, t, pattern, c: MultiU):
        if not c:
            return
        gs, gt = self.gens[self.index[s]], self.gens[self.index[t]]
        if pattern is not None:
            for k, (a, b, p) in enumerate(zip(gs.eps, gt.eps, pattern)):
                if b < a:
                    raise AssertionError(f"arrow {s}->{t} decreases cube coordinate {k}")
                if (p in (PLUS, MINUS)) != (b > a):
                    raise AssertionError(f"arrow {s}->{t} pattern {pattern} inconsistent with cube")
        d = self.arrows.setdefault((s, t), {})
        v = d[pattern] + c if pattern in d else c
        if v:
            d[pattern] = v
        else:
            del d[pattern]
            if not d:
                del self.arrows[(s, t)]

    def __len__(self):
        return len(self.gens)

    def total(self) -> dict:
        out = {}
        for k, pats in self.arrows.items():
            acc = None
            for c in pats.values():
                acc = c if acc is None else acc + c
            if acc:
                out[k] = acc
        return out

    def patterns(self):
        return sorted({p for pats in self.arrows.values() for p in pats if p is not None})

    def filtered(self, pred) -> dict:
        out = {}
        for k, pats in self.arrows.items():
            acc = None
            for p, c in pats.items():
                if p is not None and pred(p):
                    acc = c if acc is None else acc + c
            if acc:
                out[k] = acc
        return out

    def square_residue(self) -> dict:
        return mcompose(self.total(), self.total())

    def to_free(self) -> FreeComplex:
        names = [g.name for g in self.gens]
        ent = {}
        for (s, t), c in self.total().items():
            m = c.identify()
            if m:
                ent[(self.index[s], self.index[t])] = m
        return FreeComplex(names, ent, self.N, [g.gr for g in self.gens],
                           [g.spinc if g.spinc is not None else 0 for g in self.gens])

    def with_gens(self, gens) -> "SurgeryComplex":
        out = SurgeryComplex(gens, {}, self.nvars, self.N, self.annotated)
        out.arrows = {k: dict(v) for k, v in self.arrows.items()}
        return out

    def restrict_eps(self, eps) -> list:
        return [g for g in self.gens if g.eps == tuple(eps)]

    def reduce(self, track=True):
        return reduce_free(self.to_free(), track)

    def __repr__(self):
        return f"SurgeryComplex(gens={len(self.gens)}, arrows={len(self.arrows)}, N={self.N})"


def mcompose(g: dict, f: dict) -> dict:
    """Composite ``g o f`` of maps given as ``(src, dst) -> MultiU``."""
    byy = {}
    for (y, z), c in g.items():
        byy.setdefault(y, []).append((z, c))
    out = {}
    for (x, y), a in f.items():
        for z, b in byy.get(y, []):
            p = b * a
            if p:
                out[(x, z)] = out[(x, z)] + p if (x, z) in out else p
    return {k: v for k, v in out.items() if v}


def madd(*maps) -> dict:
    out = {}
    for mp in maps:
        for k, v in mp.items():
            out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if v}


# ---------- reduction over F[U]/U^N with homotopy data


def icompose(g: dict, f: dict, N: int) -> dict:
    byy = {}
    for (y, z), c in g.items():
        byy.setdefault(y, []).append((z, c))
    out = {}
    for (x, y), a in f.items():
        for z, b in byy.get(y, []):
            p = _kernel_py.clmul(b, a, N)
            if p:
                out[(x, z)] = out.get((x, z), 0) ^ p
    return {k: v for k, v in out.items() if v}


def iadd(*maps) -> dict:
    out = {}
    for mp in maps:
        for k, v in mp.items():
            out[k] = out.get(k, 0) ^ v
    return {k: v for k, v in out.items() if v}


@dataclass
class FreeReduction:
    original: FreeComplex
    reduced: FreeComplex
    incl: dict  # reduced name -> original name
    proj: dict
    htpy: dict

    def d_orig(self):
        fc = self.original
        return {(fc.names[s], fc.names[t]): m for (s, t), m in fc.entries.items()}

    def d_red(self):
        fc = self.reduced
        return {(fc.names[s], fc.names[t]): m for (s, t), m in fc.entries.items()}

    def verify(self) -> list:
        N = self.original.N
        D, R = self.d_orig(), self.d_red()
        bad = []
        if iadd(icompose(D, self.incl, N), icompose(self.incl, R, N)):
            bad.append("d(incl)")
        if iadd(icompose(R, self.proj, N), icompose(self.proj, D, N)):
            bad.append("d(proj)")
        ident_r = {(n, n): 1 for n in self.reduced.names}
        if icompose(self.proj, self.incl, N) != ident_r:
            bad.append("proj o incl = id")
        ident_o = {(n, n): 1 for n in self.original.names}
        lhs = iadd(icompose(self.incl, self.proj, N), ident_o,
                   icompose(D, self.htpy, N), icompose(self.htpy, D, N))
        if lhs:
            bad.append("incl o proj + id = dH")
        return bad

    def transport(self, f: dict) -> dict:
        """``proj o f o incl`` for an endomorphism of the original complex."""
        N = self.original.N
        return icompose(self.proj, icompose(f, self.incl, N), N)


def reduce_free(fc: FreeComplex, track: bool = True) -> FreeReduction:
    """Cancel unit arrows (constant term 1) in generator order."""
    N = fc.N
    names = list(fc.names)
    arrows = {(names[s], names[t]): m for (s, t), m in fc.entries.items() if m}
    order = {n: k for k, n in enumerate(names)}
    alive = set(names)
    ident = {(n, n): 1 for n in names}
    I, P, H = dict(ident), dict(ident), {}
    while True:
        best = None
        for (s, t), m in arrows.items():
            if not m & 1 or s == t:
                continue
            if (t, s) in arrows or (s, s) in arrows or (t, t) in arrows:
                continue
            key = (order[s], order[t])
            if best is None or key < best[0]:
                best = (key, s, t, m)
        if best is None:
            break
        _, x, y, u = best
        uinv = _kernel_py.unit_inverse(u, N)
        into_y = [(w, b) for (w, t), b in arrows.items() if t == y and w != x]
        out_x = [(z, c) for (s, z), c in arrows.items() if s == x and z != y]
        rest = alive - {x, y}
        iota = {(w, w): 1 for w in rest}
        pi = {(w, w): 1 for w in rest}
        h = {(y, x): uinv}
        for w, b in into_y:
            iota[(w, x)] = _kernel_py.clmul(uinv, b, N)
        for z, c in out_x:
            pi[(y, z)] = _kernel_py.clmul(c, uinv, N)
        for w, b in into_y:
            wb = _kernel_py.clmul(uinv, b, N)
            for z, c in out_x:
                v = arrows.get((w, z), 0) ^ _kernel_py.clmul(c, wb, N)
                if v:
                    arrows[(w, z)] = v
                else:
                    arrows.pop((w, z), None)
        for k in [k for k in arrows if x in k or y in k]:
            del arrows[k]
        if track:
            H = iadd(H, icompose(I, icompose(h, P, N), N))
            I = icompose(I, {k: v for k, v in iota.items() if v}, N)
            P = icompose({k: v for k, v in pi.items() if v}, P, N)
        alive = rest
    keep = [k for k, n in enumerate(names) if n in alive]
    red = fc.restrict(keep)
    pos = {n: k for k, n in enumerate(red.names)}
    red.entries = {(pos[s], pos[t]): m for (s, t), m in arrows.items()}
    return FreeReduction(fc, red, I if track else None, P if track else None, H if track else None)


def cube_gen_with(g: CubeGen, **kw) -> CubeGen:
    return replace(g, **kw)
