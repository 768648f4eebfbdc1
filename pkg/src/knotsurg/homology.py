"""Homology of free complexes over F[U]/U^N: towers, torsion, Betti numbers.

The elimination kernel is compiled when available (``knotsurg._kernel``) and
falls back to ``knotsurg._kernel_py`` otherwise.  Both apply the same pivot
rule, so reports do not depend on the backend.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def eliminate(n, entries, N, backend=None):
    backend = backend or BACKEND
    if backend == "cython" and _compiled is not None and N <= 64:
        return _compiled.eliminate(n, list(entries), N)
    return _kernel_py.eliminate(n, entries, N)


class ClassMismatch(ValueError):
    pass


@dataclass
class FreeComplex:
    """Free complex over F[U]/U^N with entries ``(src, dst) -> mask``."""

    names: list
    entries: dict
    N: int
    gradings: list | None = None
    classes: list | None = None

    def __post_init__(self):
        n = len(self.names)
        if self.gradings is None:
            self.gradings = [None] * n
        if self.classes is None:
            self.classes = [0] * n
        self.index = {nm: i for i, nm in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def d(self, vec: dict) -> dict:
        """Apply the differential to ``{index: mask}``."""
        out = {}
        for (s, t), m in self.entries.items():
            a = vec.get(s)
            if a:
                out[t] = out.get(t, 0) ^ _kernel_py.clmul(a, m, self.N)
        return {k: v for k, v in out.items() if v}

    def square_residue(self) -> dict:
        """Entries of d∘d that are nonzero."""
        res = {}
        cols = {}
        for (s, t), m in self.entries.items():
            cols.setdefault(s, []).append((t, m))
        for s, lst in cols.items():
            acc = {}
            for t, m in lst:
                for u, m2 in cols.get(t, []):
                    acc[u] = acc.get(u, 0) ^ _kernel_py.clmul(m2, m, self.N)
            for u, v in acc.items():
                if v:
                    res[(s, u)] = v
        return res

    def restrict(self, idx: list) -> "FreeComplex":
        pos = {g: k for k, g in enumerate(idx)}
        ent = {(pos[s], pos[t]): m for (s, t), m in self.entries.items() if s in pos and t in pos}
        return FreeComplex([self.names[i] for i in idx], ent, self.N,
                           [self.gradings[i] for i in idx], [self.classes[i] for i in idx])


@dataclass
class ClassHomology:
    label: object
    towers: list = field(default_factory=list)  # (name, grading)
    torsion: list = field(default_factory=list)  # (k, name, grading)
    warning: bool = False

    @property
    def tower_count(self):
        return len(self.towers)

    @property
    def torsion_orders(self):
        return sorted(k for k, _, _ in self.torsion)

    @property
    def d_level(self):
        gs = [g for _, g in self.towers if g is not None]
        return max(gs) if gs else None


@dataclass
class HomologyReport:
    N: int
    classes: dict
    backend: str = BACKEND

    @property
    def tower_count(self):
        return sum(c.tower_count for c in self.classes.values())

    @property
    def torsion_orders(self):
        return sorted(k for c in self.classes.values() for k in c.torsion_orders)

    @property
    def warning(self):
        return any(c.warning for c in self.classes.values())

    def dim_mod_u(self):
        """dim of H tensored with F, that is towers plus torsion summands."""
        return self.tower_count + len(self.torsion_orders)

    def d_levels(self):
        return {lab: c.d_level for lab, c in self.classes.items() if c.tower_count}

    def summary(self):
        tors = Counter(self.torsion_orders)
        tt = ", ".join(f"F[U]/U^{k} x{m}" for k, m in sorted(tors.items())) or "none"
        return f"towers={self.tower_count} torsion={tt} N={self.N}"


def as_free(c) -> FreeComplex:
    if isinstance(c, FreeComplex):
        return c
    if hasattr(c, "to_free"):
        return c.to_free()
    raise TypeError(f"cannot take homology of {type(c).__name__}")


def _split(fc: FreeComplex):
    groups = {}
    for i, lab in enumerate(fc.classes):
        groups.setdefault(lab, []).append(i)
    for (s, t) in fc.entries:
        if fc.classes[s] != fc.classes[t]:
            raise ClassMismatch(f"arrow {fc.names[s]} -> {fc.names[t]} crosses classes")
    return groups


def homology(c, backend=None) -> HomologyReport:
    fc = as_free(c)
    out = {}
    for lab, idx in sorted(_split(fc).items(), key=lambda kv: _label_key(kv[0])):
        sub = fc.restrict(idx)
        ent = [(s, t, m) for (s, t), m in sorted(sub.entries.items())]
        pairs, surv = eliminate(len(sub), ent, fc.N, backend)
        ch = ClassHomology(lab)
        for s, t, k in pairs:
            if k >= 1:
                ch.torsion.append((k, sub.names[t], sub.gradings[t]))
            if k == fc.N - 1:
                ch.warning = True
        for i in surv:
            ch.towers.append((sub.names[i], sub.gradings[i]))
        out[lab] = ch
    return HomologyReport(fc.N, out, backend or BACKEND)


def _label_key(lab):
    if isinstance(lab, tuple):
        return (1, tuple(str(x) for x in lab))
    return (0, str(lab))


def _rank_gf2(rows):
    piv = {}
    r = 0
    for v in rows:
        while v:
            b = v.bit_length() - 1
            if b in piv:
                v ^= piv[b]
            else:
                piv[b] = v
                r += 1
                break
    return r


def betti_at_u0(c) -> dict:
    """dim H(C/U) per Maslov grading (key None when gradings are unset)."""
    fc = as_free(c)
    n = len(fc)
    bygr = {}
    for i, g in enumerate(fc.gradings):
        bygr.setdefault(g, []).append(i)
    # rank of d out of each grading, mod U
    rank_out = {}
    for g, idx in bygr.items():
        pos = set(idx)
        rows = {}
        for (s, t), m in fc.entries.items():
            if s in pos and m & 1:
                rows[s] = rows.get(s, 0) ^ (1 << t)
        rank_out[g] = _rank_gf2(list(rows.values()))
    out = {}
    for g, idx in bygr.items():
        into = 0
        if g is None:
            into = rank_out[g]
        else:
            into = rank_out.get(g + 1, 0)
        out[g] = len(idx) - rank_out[g] - into
    if n == 0:
        return {}
    return {g: v for g, v in sorted(out.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))}


def tower_generator_check(c, z: dict) -> bool:
    """True iff the cycle ``z`` (name -> mask) generates a tower summand.

    Uses the cone on ``F[U] -> C, 1 -> z``: it must lose exactly one tower
    and keep the torsion unchanged.
    """
    fc = as_free(c)
    vec = {fc.index[k]: v for k, v in z.items() if v}
    if fc.d(vec):
        return False
    before = homology(fc)
    n = len(fc)
    ent = dict(fc.entries)
    for i, m in vec.items():
        ent[(n, i)] = m
    labels = {fc.classes[i] for i in vec}
    if len(labels) != 1:
        return False
    lab = labels.pop()
    grs = {fc.gradings[i] for i in vec}
    g0 = grs.pop() if len(grs) == 1 else None
    cone = FreeComplex(fc.names + ["__cone__"], ent, fc.N,
                       fc.gradings + [None if g0 is None else g0 + 1], fc.classes + [lab])
    after = homology(cone)
    return (after.tower_count == before.tower_count - 1
            and after.torsion_orders == before.torsion_orders)


def as_fraction(x):
    return None if x is None else Fraction(x)
