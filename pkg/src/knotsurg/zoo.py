"""Explicit modules: solid tori, the solid-torus type-A module, gluing
modules, framing bimodules and staircase knots."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Elem, phi_sigma_mono, phi_tau_mono
from .coeff import Policy, UAdic
from .modules import (
    Generator,
    TypeAModule,
    TypeDModule,
    ValidationFailed,
    validate,
)


def _e(policy, *terms):
    return Elem(len(terms[0]), terms, policy)


def make_dn(n: int, policy: Policy | None = None) -> TypeDModule:
    """n-framed solid torus: x0 -> x1 with sigma + T^n tau."""
    pol = policy or UAdic(16)
    gens = [Generator("x0", (0,), Fraction(0), (0,)), Generator("x1", (1,), Fraction(0), None)]
    arrows = {("x0", "x1"): _e(pol, (("s", 0, 0),), (("t", 0, n),))}
    return TypeDModule(gens, arrows, pol, 1, framing=n, name=f"D_{n}")


def make_dinfty(policy: Policy | None = None) -> TypeDModule:
    """The six-generator infinity-framed solid torus."""
    pol = policy or UAdic(16)
    gens = [
        Generator("x0+", (0,)), Generator("x0-", (0,)),
        Generator("y0+", (0,)), Generator("y0-", (0,)),
        Generator("z1+", (1,)), Generator("z1-", (1,)),
    ]
    arrows = {
        ("x0+", "x0-"): _e(pol, (("0", 0, 0),), (("0", 1, 0),)),
        ("x0+", "z1+"): _e(pol, (("t", 0, -1),)),
        ("x0-", "z1-"): _e(pol, (("t", 0, 0),)),
        ("y0+", "y0-"): _e(pol, (("0", 0, 0),), (("0", 0, 1),)),
        ("y0+", "z1+"): _e(pol, (("s", 0, 0),)),
        ("y0-", "z1-"): _e(pol, (("s", 0, 0),)),
        ("z1+", "z1-"): _e(pol, (("1", 0, 0),), (("1", 0, 1),)),
    }
    return TypeDModule(gens, arrows, pol, 1, name="D_inf")


def make_dinfty_twisted(m: int, policy: Policy | None = None) -> TypeDModule:
    """Two generators z1+ -> z1- with 1 + T^m."""
    if m < 1:
        raise ValueError("m must be positive")
    pol = policy or UAdic(16)
    gens = [Generator("z1+", (1,)), Generator("z1-", (1,))]
    arrows = {("z1+", "z1-"): _e(pol, (("1", 0, 0),), (("1", 0, m),))}
    return TypeDModule(gens, arrows, pol, 1, name=f"D_inf/{m}")


# ---------- type-A modules


def _g(a):
    """Exponents (p, q) of the basis element g_a = U_^p V_^q."""
    return max(0, -a), max(0, a)


def d0_act(term, lab):
    """Action of one algebra term on a solid-torus basis label.

    Returns ``(label, U exponent, pattern)`` or None.
    """
    kind, x, y = term
    side, v = lab
    if kind == "0":
        if side != "A":
            return None
        p, q = _g(v)
        P, Q = p + x, q + y
        return ("A", Q - P), min(P, Q), "."
    if kind == "1":
        if side != "B":
            return None
        return ("B", v + y), x, "."
    if side != "A":
        return None
    p, q = _g(v)
    if kind == "s":
        return ("B", y + v), x + p, "+"
    return ("B", y + v), x + q, "-"


def _framings(dmod, k):
    fr = dmod.framing
    if fr is None:
        return 0
    if isinstance(fr, (tuple, list)):
        return fr[k]
    return fr


def _alex(gen, k):
    if gen.alex is None:
        return 0
    return gen.alex[k]


class SolidTorusA(TypeAModule):
    """The solid-torus type-A module, one copy per tensor factor.

    Idempotent 0 has basis g_a = U_^max(0,-a) V_^max(0,a); idempotent 1 has
    basis T^t.  Sigma and tau act through phi_sigma and phi_tau.
    """

    max_m = 2

    def __init__(self, arity: int = 1):
        self.arity = arity
        self.nvars = arity
        self.out_arity = arity

    def factor_basis(self, gen, dmod, W, k):
        if gen.idem[k] == 0:
            A = _alex(gen, k)
            out = []
            for s in range(-W, W + 1):
                a = s - A
                if a != int(a):
                    continue
                a = int(a)
                out.append((("A", a), 0, s, -2 * _g(a)[0]))
            return out
        n = _framings(dmod, k)
        return [(("B", t), 1, t, 0) for t in range(-W + n, W + 1)]

    def basis(self, gen, dmod, W):
        out = [((), (), (), 0)]
        for k in range(self.arity):
            nxt = []
            for lab, eps, alex, g in out:
                for l2, e2, a2, g2 in self.factor_basis(gen, dmod, W, k):
                    nxt.append((lab + (l2,), eps + (e2,), alex + (a2,), g + g2))
            out = nxt
        if self.arity == 1:
            return [(lab[0], eps, alex, g) for lab, eps, alex, g in out]
        return out

    def m2(self, tensor_term, label):
        labs = (label,) if self.arity == 1 else label
        outl, exps, pat = [], [], []
        for term, lab in zip(tensor_term, labs):
            r = d0_act(term, lab)
            if r is None:
                return []
            outl.append(r[0])
            exps.append(r[1])
            pat.append(r[2])
        lab2 = outl[0] if self.arity == 1 else tuple(outl)
        return [(lab2, tuple(exps), "".join(pat))]


def make_d0_type_a(arity: int = 1) -> SolidTorusA:
    return SolidTorusA(arity)


class IdentitySup(TypeAModule):
    """Type-A identity module over two tensor factors used for gluing.

    Idempotent (0,0) carries F[U_, V_] and (1,1) carries F[U, T, T^-1]; m2 is
    the product on undecorated inputs and m3 pairs a decoration in the second
    factor (first step) with the same decoration in the first factor.
    """

    arity = 2
    nvars = 1
    out_arity = 1
    max_m = 3

    def basis(self, gen, dmod, W):
        if gen.idem == (0, 0):
            A = _alex(gen, 0) + _alex(gen, 1)
            out = []
            for s in range(-W, W + 1):
                a = int(s - A)
                out.append((("A", a), (0,), (s,), -2 * _g(a)[0]))
            return out
        if gen.idem == (1, 1):
            n = _framings(dmod, 0) + _framings(dmod, 1)
            return [(("B", t), (1,), (t,), 0) for t in range(-W + n, W + 1)]
        return []

    def m2(self, tensor_term, label):
        (k1, a1, b1), (k2, a2, b2) = tensor_term
        if k1 != k2 or k1 not in ("0", "1"):
            return []
        r = d0_act((k1, a1 + a2, b1 + b2), label)
        if r is None:
            return []
        return [(r[0], (r[1],), r[2])]

    def m3(self, second, first, label):
        p, q = first
        r, s = second
        if p[0] != "0" or s[0] != "1" or q[0] not in ("s", "t") or r[0] != q[0]:
            return []
        side, a = label
        if side != "A":
            return []
        g0, g1 = _g(a)
        P, Q = g0 + p[1], g1 + p[2]
        u, t = phi_sigma_mono(P, Q) if q[0] == "s" else phi_tau_mono(P, Q)
        u += q[1] + r[1] + s[1]
        t += q[2] + r[2] + s[2]
        return [(("B", t), (u,), "+" if q[0] == "s" else "-")]


def make_isup() -> IdentitySup:
    return IdentitySup()


class MergeA(TypeAModule):
    """Idempotent-0 restriction of the merge module: m2((a|b), x) = a b x."""

    arity = 2
    nvars = 1
    out_arity = 1
    max_m = 2

    def basis(self, gen, dmod, W):
        if gen.idem != (0, 0):
            return []
        A = _alex(gen, 0) + _alex(gen, 1)
        return [(("A", int(s - A)), (0,), (s,), -2 * _g(int(s - A))[0]) for s in range(-W, W + 1)]

    def m2(self, tensor_term, label):
        (k1, a1, b1), (k2, a2, b2) = tensor_term
        if k1 != "0" or k2 != "0":
            return []
        r = d0_act(("0", a1 + a2, b1 + b2), label)
        return [] if r is None else [(r[0], (r[1],), r[2])]


def make_merge() -> MergeA:
    return MergeA()


@dataclass(frozen=True)
class PhiBimodule:
    """Generator-free DA bimodule of the ring map phi_{n,m}.

    U_ -> U_^m, V_ -> V_^m, U -> U^m, T -> T^m, sigma -> sigma,
    tau -> T^n tau.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")

    def map_term(self, term):
        k, a, b = term
        m = self.m
        if k == "t":
            return (k, m * a, m * b + self.n)
        return (k, m * a, m * b)

    def map_elem(self, e: Elem) -> Elem:
        return Elem(e.arity, [tuple(self.map_term(x) for x in t) for t in e.terms], e.policy)

    def apply(self, d: TypeDModule) -> TypeDModule:
        if d.arity != 1:
            raise ValueError("phi bimodule acts on arity-1 modules")
        arrows = {k: self.map_elem(e) for k, e in d.arrows.items()}
        fr = None if d.framing is None else d.framing * self.m + self.n
        return TypeDModule(d.gens, arrows, d.policy, 1, fr, d.name)


def phi_bimodule(n: int, m: int) -> PhiBimodule:
    return PhiBimodule(n, m)


def identity_type_a() -> PhiBimodule:
    return PhiBimodule(0, 1)


# ---------- staircase knots


@dataclass(frozen=True)
class StaircaseSpec:
    """Step lengths ``(n_1, ..., n_2k)`` of a palindromic staircase."""

    steps: tuple
    framing: int = 0
    name: str | None = None

    def check(self):
        st = tuple(self.steps)
        if len(st) % 2:
            raise ValidationFailed(f"staircase needs an even number of steps, got {len(st)}")
        if any(int(s) != s or s < 1 for s in st):
            raise ValidationFailed("steps must be positive integers")
        if st != st[::-1]:
            raise ValidationFailed("steps must be palindromic for a symmetric complex")


PRESETS = {
    "unknot": (),
    "trefoil": (1, 1),
    "T(2,5)": (1, 1, 1, 1),
    "T(3,4)": (1, 2, 2, 1),
    "T(2,7)": (1, 1, 1, 1, 1, 1),
}


def staircase_cfk(steps):
    """Generators ``[(A, grw)]`` and arrows ``[(src, dst, p, q)]``."""
    steps = tuple(steps)
    g = sum(steps) // 2 if sum(steps) % 2 == 0 else Fraction(sum(steps), 2)
    A = [g]
    G = [0]
    for k, n in enumerate(steps):
        A.append(A[-1] - n)
        if k % 2 == 0:
            G.append(G[-1] - 2 * n + 1)
        else:
            G.append(G[-1] - 1)
    arrows = []
    for i in range(len(steps) // 2):
        src = 2 * i + 1
        arrows.append((src, 2 * i, steps[2 * i], 0))
        arrows.append((src, 2 * i + 2, 0, steps[2 * i + 1]))
    return list(zip(A, G)), arrows


def make_staircase_knot(spec: StaircaseSpec, policy: Policy | None = None) -> TypeDModule:
    spec.check()
    pol = policy or UAdic(16)
    lam = spec.framing
    cfk, arrows_cfk = staircase_cfk(spec.steps)
    r = len(cfk)
    if r == 1:
        n0, n1 = ["x0"], ["x1"]
    else:
        n0 = [f"x0.{i}" for i in range(r)]
        n1 = [f"x1.{i}" for i in range(r)]
    gens = [Generator(n0[i], (0,), Fraction(G), (A,)) for i, (A, G) in enumerate(cfk)]
    gens += [Generator(n1[i], (1,), Fraction(G), None) for i, (A, G) in enumerate(cfk)]
    arrows = {}

    def add(s, t, term):
        e = Elem(1, [(term,)], pol)
        arrows[(s, t)] = arrows[(s, t)] + e if (s, t) in arrows else e

    for s, t, p, q in arrows_cfk:
        add(n0[s], n0[t], ("0", p, q))
        add(n1[s], n1[t], ("1", p, 0))
    for i, (A, _) in enumerate(cfk):
        add(n0[i], n1[i], ("s", 0, A))
        add(n0[i], n1[r - 1 - i], ("t", 0, lam + A))
    name = spec.name or f"staircase{tuple(spec.steps)}"
    cfk_meta = {n0[i]: A for i, (A, _) in enumerate(cfk)}
    m = TypeDModule(gens, arrows, pol, 1, framing=lam, name=name, cfk=cfk_meta)
    v = validate(m)
    if v is not None:
        raise ValidationFailed(f"structure relation fails: {v}")
    return m


def preset_knot(name: str, framing: int, policy: Policy | None = None) -> TypeDModule:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return make_staircase_knot(StaircaseSpec(PRESETS[name], framing, name), policy)


def idem0_betti(m: TypeDModule) -> int:
    """dim over F of the idempotent-0 part with every curly variable set to 0."""
    from .homology import _rank_gf2

    keep, arr = m.idem_restriction((0,) * m.arity)
    pos = {g.name: k for k, g in enumerate(keep)}
    rows = {}
    for (s, t), e in arr.items():
        if any(all(x[1] == 0 and x[2] == 0 for x in term) for term in e.terms):
            rows[s] = rows.get(s, 0) ^ (1 << pos[t])
    r = _rank_gf2(list(rows.values()))
    return len(keep) - 2 * r
