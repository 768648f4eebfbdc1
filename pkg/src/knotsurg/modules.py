"""Type-D modules, morphisms, cones, reduction and tensor products.

Arrow convention: an arrow ``x -> y`` carries a coefficient whose left
idempotent is y's and right idempotent is x's.  Along a path ``x -> y -> z``
with coefficients ``a1`` then ``a2`` the product is ``a2 * a1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .algebra import Elem, LEFT, RIGHT, alg_mul, from_series, split_kinds, to_series
from .coeff import IDEM0, IDEM1, NotAUnit, Policy, Series, divide, invert, is_unit


class NotACycle(ValueError):
    def __init__(self, residue):
        super().__init__(f"morphism is not a cycle: {residue}")
        self.residue = residue


class ValidationFailed(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    idem: tuple
    gr: Fraction | None = None
    alex: tuple | None = None


@dataclass(frozen=True)
class Violation:
    """A nonzero entry of delta squared."""

    src: str
    dst: str
    residue: Elem

    def __str__(self):
        return f"delta^2({self.src} -> {self.dst}) = {self.residue}"


class TypeDModule:
    """Finitely generated type-D module over the arity-fold tensor algebra."""

    def __init__(self, gens, arrows, policy: Policy, arity: int = 1, framing=None, name=None, cfk=None):
        self.arity = arity
        self.policy = policy
        self.gens = list(gens)
        self.index = {g.name: k for k, g in enumerate(self.gens)}
        if len(self.index) != len(self.gens):
            raise ValueError("duplicate generator names")
        self.framing = framing
        self.name = name
        self.cfk = cfk
        self.arrows = {}
        for (s, t), e in arrows.items():
            self._add(s, t, e)

    def _add(self, s, t, e):
        if not isinstance(e, Elem):
            raise TypeError("arrow coefficient must be an Elem")
        if e.arity != self.arity or e.policy != self.policy:
            raise ValueError(f"arrow {s}->{t}: arity or policy mismatch")
        if s not in self.index or t not in self.index:
            raise KeyError(f"unknown generator in arrow {s}->{t}")
        check_arrow(self.gen(s).idem, self.gen(t).idem, e, f"{s}->{t}")
        v = self.arrows.get((s, t))
        v = e if v is None else v + e
        if v:
            self.arrows[(s, t)] = v
        else:
            self.arrows.pop((s, t), None)

    def gen(self, name) -> Generator:
        return self.gens[self.index[name]]

    def names(self):
        return [g.name for g in self.gens]

    def out(self):
        res = {g.name: [] for g in self.gens}
        for (s, t), e in self.arrows.items():
            res[s].append((t, e))
        for s in res:
            res[s].sort(key=lambda p: self.index[p[0]])
        return res

    def with_policy(self, policy: Policy) -> "TypeDModule":
        arr = {k: e.with_policy(policy) for k, e in self.arrows.items()}
        return TypeDModule(self.gens, arr, policy, self.arity, self.framing, self.name, self.cfk)

    def renamed(self, fn) -> "TypeDModule":
        gens = [replace(g, name=fn(g.name)) for g in self.gens]
        arr = {(fn(s), fn(t)): e for (s, t), e in self.arrows.items()}
        return TypeDModule(gens, arr, self.policy, self.arity, self.framing, self.name, self.cfk)

    def same_structure(self, other: "TypeDModule") -> bool:
        return (self.arity == other.arity and self.policy == other.policy
                and [(g.name, g.idem) for g in self.gens] == [(g.name, g.idem) for g in other.gens]
                and self.arrows == other.arrows)

    def idem_restriction(self, idem: tuple):
        """Generators and arrows living in one idempotent vector."""
        keep = [g for g in self.gens if g.idem == idem]
        names = {g.name for g in keep}
        arr = {k: e for k, e in self.arrows.items() if k[0] in names and k[1] in names}
        return keep, arr

    def __repr__(self):
        return f"TypeDModule({self.name or ''}, gens={len(self.gens)}, arrows={len(self.arrows)}, {self.policy})"


def check_arrow(src_idem, dst_idem, e: Elem, where=""):
    for t in e.terms:
        left = tuple(LEFT[x[0]] for x in t)
        right = tuple(RIGHT[x[0]] for x in t)
        if left != tuple(dst_idem) or right != tuple(src_idem):
            raise ValueError(f"arrow {where}: idempotents {right}->{left} do not match endpoints")
    lev = e.min_ulevel()
    if lev is not None and lev < 0:
        raise AssertionError(f"arrow {where} has negative U-level")


def idem_elem(idem: tuple, policy: Policy) -> Elem:
    return Elem.idem(tuple(idem), policy)


def validate(m: TypeDModule, swapped: bool = False):
    """Return None if delta^2 vanishes, else the first :class:`Violation`.

    ``swapped`` multiplies in the opposite order and exists only to show the
    convention matters.
    """
    out = m.out()
    for g in m.gens:
        acc = {}
        for y, a1 in out[g.name]:
            for z, a2 in out[y]:
                p = alg_mul(a1, a2) if swapped else alg_mul(a2, a1)
                if p:
                    acc[z] = acc[z] + p if z in acc else p
        for z in sorted(acc, key=lambda n: m.index[n]):
            if acc[z]:
                return Violation(g.name, z, acc[z])
    return None


def tensor(x: TypeDModule, y: TypeDModule, sep: str = "|") -> TypeDModule:
    """Tensor product over F of two type-D modules (Leibniz differential)."""
    if x.policy != y.policy:
        raise ValueError("policy mismatch")
    pol = x.policy
    gens = []
    for a in x.gens:
        for b in y.gens:
            gr = None if a.gr is None or b.gr is None else a.gr + b.gr
            alex = None if a.alex is None or b.alex is None else tuple(a.alex) + tuple(b.alex)
            gens.append(Generator(f"{a.name}{sep}{b.name}", tuple(a.idem) + tuple(b.idem), gr, alex))
    arrows = {}
    for (s, t), e in x.arrows.items():
        for b in y.gens:
            ib = idem_elem(b.idem, pol)
            coeff = Elem(x.arity + y.arity, [p + q for p in e.terms for q in ib.terms], pol)
            arrows[(f"{s}{sep}{b.name}", f"{t}{sep}{b.name}")] = coeff
    for (s, t), e in y.arrows.items():
        for a in x.gens:
            ia = idem_elem(a.idem, pol)
            coeff = Elem(x.arity + y.arity, [p + q for p in ia.terms for q in e.terms], pol)
            key = (f"{a.name}{sep}{s}", f"{a.name}{sep}{t}")
            arrows[key] = arrows[key] + coeff if key in arrows else coeff
    fr = None
    if x.framing is not None and y.framing is not None:
        fr = tuple(_as_tuple(x.framing)) + tuple(_as_tuple(y.framing))
    return TypeDModule(gens, arrows, pol, x.arity + y.arity, fr, None)


def _as_tuple(v):
    return tuple(v) if isinstance(v, (tuple, list)) else (v,)


# ---------- morphisms


class DMorphism:
    """A morphism of type-D modules given by arrows ``(src, dst) -> Elem``."""

    def __init__(self, source: TypeDModule, target: TypeDModule, comps: dict):
        if source.arity != target.arity or source.policy != target.policy:
            raise ValueError("morphism between incompatible modules")
        self.source = source
        self.target = target
        self.comps = {}
        for (s, t), e in comps.items():
            if s not in source.index or t not in target.index:
                raise KeyError(f"morphism arrow {s}->{t} has unknown endpoint")
            check_arrow(source.gen(s).idem, target.gen(t).idem, e, f"{s}->{t}")
            v = self.comps.get((s, t))
            v = e if v is None else v + e
            if v:
                self.comps[(s, t)] = v
            else:
                self.comps.pop((s, t), None)

    def __add__(self, other):
        c = dict(self.comps)
        for k, e in other.comps.items():
            c[k] = c[k] + e if k in c else e
        return DMorphism(self.source, self.target, c)

    def __bool__(self):
        return bool(self.comps)

    def __repr__(self):
        return f"DMorphism({len(self.comps)} arrows)"

    def describe(self):
        return "; ".join(f"{s}->{t}: {e}" for (s, t), e in sorted(self.comps.items()))


def identity(m: TypeDModule, coeff=None) -> DMorphism:
    """Identity, or ``coeff`` times the identity for a central PLAINU series."""
    comps = {}
    for g in m.gens:
        comps[(g.name, g.name)] = central(coeff, g.idem, m.policy) if coeff is not None else idem_elem(g.idem, m.policy)
    return DMorphism(m, m, comps)


def central(s: Series, idem: tuple, policy: Policy) -> Elem:
    """A series in U viewed as a central element in the given idempotent."""
    terms = []
    for (k,) in s.terms:
        terms.append(tuple(("0", k, k) if i == 0 else ("1", k, 0) for i in idem))
    return Elem(len(idem), terms, policy)


def compose(g: DMorphism, f: DMorphism) -> DMorphism:
    """``g o f``: first f then g, product ``g * f``."""
    if f.target is not g.source and f.target.names() != g.source.names():
        raise ValueError("composition mismatch")
    bysrc = {}
    for (y, z), e in g.comps.items():
        bysrc.setdefault(y, []).append((z, e))
    comps = {}
    for (x, y), a in f.comps.items():
        for z, b in bysrc.get(y, []):
            p = alg_mul(b, a)
            if p:
                comps[(x, z)] = comps[(x, z)] + p if (x, z) in comps else p
    return DMorphism(f.source, g.target, comps)


def _module_as_morphism(m: TypeDModule) -> DMorphism:
    return DMorphism(m, m, m.arrows)


def morphism_differential(f: DMorphism) -> DMorphism:
    dx = _module_as_morphism(f.source)
    dy = _module_as_morphism(f.target)
    return compose(dy, f) + compose(f, dx)


def verify_homotopy(F: DMorphism, G: DMorphism, H: DMorphism, target: DMorphism) -> DMorphism:
    """Residue of ``G o F + target + dH``; empty means the identity holds."""
    return compose(G, F) + target + morphism_differential(H)


def cone(f: DMorphism, check: bool = True) -> TypeDModule:
    x, y = f.source, f.target
    if set(x.index) & set(y.index):
        raise ValueError("cone needs disjoint generator names")
    if check:
        r = morphism_differential(f)
        if r:
            raise NotACycle(r.describe())
    arrows = dict(x.arrows)
    arrows.update(y.arrows)
    for k, e in f.comps.items():
        arrows[k] = e
    return TypeDModule(x.gens + y.gens, arrows, x.policy, x.arity)


# ---------- reduction


def elem_inverse(e: Elem):
    """Inverse of a pure tensor of units, else None."""
    if not e.terms:
        return None
    facs = [sorted({t[k] for t in e.terms}) for k in range(e.arity)]
    total = 1
    for f in facs:
        total *= len(f)
    if total != len(e.terms):
        return None
    if set(itertools.product(*facs)) != set(e.terms):
        return None
    invs = []
    for f in facs:
        kinds = {x[0] for x in f}
        if len(kinds) != 1 or kinds & {"s", "t"}:
            return None
        s = to_series(Elem(1, [(x,) for x in f], e.policy))
        if not is_unit(s):
            return None
        try:
            invs.append(sorted(from_series(invert(s)).terms))
        except NotAUnit:
            return None
    terms = [tuple(x[0] for x in combo) for combo in itertools.product(*invs)]
    return Elem(e.arity, terms, e.policy)


@dataclass
class Reduction:
    """A reduced module with inclusion, projection and homotopy."""

    original: TypeDModule
    reduced: TypeDModule
    incl: DMorphism
    proj: DMorphism
    htpy: DMorphism
    cancelled: list = field(default_factory=list)

    def verify(self) -> list:
        """Names of failed identities (empty when all hold)."""
        bad = []
        if morphism_differential(self.incl):
            bad.append("d(incl)")
        if morphism_differential(self.proj):
            bad.append("d(proj)")
        if compose(self.proj, self.incl).comps != identity(self.reduced).comps:
            bad.append("proj o incl = id")
        r = compose(self.incl, self.proj) + identity(self.original) + morphism_differential(self.htpy)
        if r:
            bad.append("incl o proj + id = dH")
        return bad


def _pick_pivot(m: TypeDModule, arrows, alive):
    order = {g.name: k for k, g in enumerate(m.gens)}
    best = None
    for (s, t), e in arrows.items():
        if s == t or s not in alive or t not in alive:
            continue
        key = (order[s], order[t])
        if best is not None and key >= best[0]:
            continue
        if (t, s) in arrows or (s, s) in arrows or (t, t) in arrows:
            continue
        inv = elem_inverse(e)
        if inv is not None:
            best = (key, s, t, inv)
    return best


def reduce(m, track: bool = True):
    """Cancel invertible arrows until none remain.

    For a type-D module returns a :class:`Reduction`; surgery complexes are
    delegated to their own ``reduce``.
    """
    if not isinstance(m, TypeDModule):
        return m.reduce(track=track)
    pol = m.policy
    arrows = dict(m.arrows)
    alive = {g.name for g in m.gens}
    gens = {g.name: g for g in m.gens}

    def comp(h, f):
        byy = {}
        for (y, z), e in h.items():
            byy.setdefault(y, []).append((z, e))
        out = {}
        for (x, y), a in f.items():
            for z, b in byy.get(y, []):
                p = alg_mul(b, a)
                if p:
                    out[(x, z)] = out[(x, z)] + p if (x, z) in out else p
        return {k: v for k, v in out.items() if v}

    def addto(d, k, v):
        w = d[k] + v if k in d else v
        if w:
            d[k] = w
        else:
            d.pop(k, None)

    ident = {(g.name, g.name): idem_elem(g.idem, pol) for g in m.gens}
    I = dict(ident)
    P = dict(ident)
    H = {}
    cancelled = []
    while True:
        piv = _pick_pivot(m, arrows, alive)
        if piv is None:
            break
        _, x, y, uinv = piv
        into_y = [(w, e) for (w, t), e in arrows.items() if t == y and w != x]
        out_x = [(z, e) for (s, z), e in arrows.items() if s == x and z != y]
        rest = alive - {x, y}
        iota = {(w, w): idem_elem(gens[w].idem, pol) for w in rest}
        pi = {(w, w): idem_elem(gens[w].idem, pol) for w in rest}
        h = {(y, x): uinv}
        for w, b in into_y:
            addto(iota, (w, x), alg_mul(uinv, b))
        for z, c in out_x:
            addto(pi, (y, z), alg_mul(c, uinv))
        for w, b in into_y:
            for z, c in out_x:
                addto(arrows, (w, z), alg_mul(c, alg_mul(uinv, b)))
        for k in [k for k in arrows if x in k or y in k]:
            del arrows[k]
        if track:
            newH = comp(I, comp(h, P))
            for k, v in newH.items():
                addto(H, k, v)
            I = comp(I, iota)
            P = comp(pi, P)
        alive = rest
        cancelled.append((x, y))
    red_gens = [g for g in m.gens if g.name in alive]
    red = TypeDModule(red_gens, arrows, pol, m.arity, m.framing, m.name)
    if not track:
        return Reduction(m, red, None, None, None, cancelled)
    return Reduction(m, red, DMorphism(red, m, I), DMorphism(m, red, P), DMorphism(m, m, H), cancelled)


def is_minimal(m: TypeDModule) -> bool:
    return _pick_pivot(m, m.arrows, {g.name for g in m.gens}) is None


# ---------- isomorphism on small modules


def find_isomorphism(a: TypeDModule, b: TypeDModule, max_gens: int = 4, scaled: bool = False):
    """Generator bijection carrying a's arrows to b's, by exhaustive matching.

    With ``scaled`` the bijection may also rescale generators by units
    (arity 1, undecorated arrows only); the result is then
    ``(mapping, {name: unit})``.
    """
    if len(a.gens) != len(b.gens) or len(a.gens) > max_gens:
        return None
    for perm in itertools.permutations(range(len(b.gens))):
        mp = {a.gens[i].name: b.gens[j].name for i, j in enumerate(perm)}
        if any(a.gens[i].idem != b.gens[j].idem for i, j in enumerate(perm)):
            continue
        img = {(mp[s], mp[t]): e for (s, t), e in a.arrows.items()}
        if img == b.arrows:
            return (mp, {}) if scaled else mp
        if scaled:
            units = _match_scaled(a, b, img)
            if units is not None:
                return mp, units
    return None


def _match_scaled(a, b, img):
    """Units u with ``b(s->t) = u_t * img(s->t) * u_s^-1``, found along arrows."""
    if a.arity != 1 or set(img) != set(b.arrows):
        return None
    kinds = {x[0] for e in list(img.values()) + list(b.arrows.values()) for (x,) in e.terms}
    if kinds & {"s", "t"}:
        return None
    units = {}
    pending = sorted(img, key=lambda k: (b.index[k[0]], b.index[k[1]]))
    while pending:
        k = next((k for k in pending if k[0] in units or k[1] in units), pending[0])
        pending.remove(k)
        s, t = k
        src, dst = to_series(img[k]), to_series(b.arrows[k])
        if s not in units and t not in units:
            units[s] = Series.one(src.ring, a.policy)
        if s in units:
            q = divide(dst * units[s], src)
            known = t
        else:
            q = divide(src * units[t], dst)
            known = s
        if not isinstance(q, Series) or not is_unit(q):
            return None
        if known in units and units[known] != q:
            return None
        units[known] = q
    return units


def positivity_violations(m) -> list:
    """Arrows with a negative U-level (should always be empty)."""
    bad = []
    arrows = m.arrows if isinstance(m, TypeDModule) else m.comps
    for k, e in arrows.items():
        lev = e.min_ulevel()
        if lev is not None and lev < 0:
            bad.append(k)
        for t in e.terms:
            for x in t:
                if x[1] < 0 or (x[0] == "0" and x[2] < 0):
                    bad.append(k)
    return bad


# ---------- type-A modules and box tensor products


class UnboundedAction(RuntimeError):
    pass


class TypeAModule:
    """Intensionally presented type-A module.

    Subclasses give a finite windowed basis per type-D generator and the
    action maps.  Each action returns ``(label, exps, pattern)`` triples:
    the output basis label, a tuple of U exponents and an orientation pattern.
    """

    arity = 1
    nvars = 1
    out_arity = 1
    max_m = 2

    def basis(self, gen: Generator, dmod: TypeDModule, W: int):
        raise NotImplementedError

    def m2(self, tensor_term, label):
        return []

    def m3(self, second, first, label):
        return []


def box_tensor(d: TypeDModule, a: TypeAModule, W: int = 8, N: int | None = None):
    """Box tensor product ``d ⊠ a`` as a :class:`SurgeryComplex`.

    Only windowed basis elements are kept; arrows leaving the window are
    dropped.  ``N`` defaults to the policy precision.
    """
    from .cube import CubeGen, MultiU, SurgeryComplex

    if a.arity != d.arity:
        raise ValueError(f"type-A arity {a.arity} does not match type-D arity {d.arity}")
    if a.max_m > 3:
        raise UnboundedAction("only m2 and m3 are supported")
    N = N or d.policy.N
    gens = []
    labels = {}
    for g in d.gens:
        for lab, eps, alex, dgrw in a.basis(g, d, W):
            name = f"{g.name}:{_fmt_label(lab)}"
            grw = None if g.gr is None else Fraction(g.gr) + dgrw
            gens.append(CubeGen(name, tuple(eps), tuple(alex), grw))
            labels[(g.name, lab)] = name
    out = SurgeryComplex(gens, {}, a.nvars, N)
    bylab = {}
    for (gname, lab), name in labels.items():
        bylab.setdefault(gname, []).append((lab, name))
    adj = d.out()
    for x in d.gens:
        for lab, src in bylab.get(x.name, []):
            for y, e in adj[x.name]:
                for t in e.terms:
                    for lab2, exps, pat in a.m2(t, lab):
                        dst = labels.get((y, lab2))
                        if dst is not None:
                            out.add(src, dst, pat, MultiU.mono(exps, N))
                if a.max_m < 3:
                    continue
                for z, e2 in adj[y]:
                    for t1 in e.terms:
                        for t2 in e2.terms:
                            for lab2, exps, pat in a.m3(t2, t1, lab):
                                dst = labels.get((z, lab2))
                                if dst is not None:
                                    out.add(src, dst, pat, MultiU.mono(exps, N))
    return out


def _fmt_label(lab):
    if isinstance(lab, tuple) and lab and isinstance(lab[0], tuple):
        return ",".join(_fmt_label(x) for x in lab)
    kind, v = lab
    return f"{kind}{v}"
