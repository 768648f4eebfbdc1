"""Truncated power series of the exact triangle, their factorizations and
the full triangle verification."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Elem, from_series, phi_sigma, phi_tau
from .coeff import (
    IDEM0,
    IDEM1,
    PLAINU,
    Indivisible,
    Policy,
    Series,
    UAdic,
    ChiralWindow,
    divide,
    invert,
    is_unit,
)
from .modules import (
    DMorphism,
    NotACycle,
    TypeDModule,
    cone,
    find_isomorphism,
    identity,
    morphism_differential,
    reduce,
    verify_homotopy,
)
from .zoo import make_dinfty, make_dn

NAMES = ("alpha", "beta1", "beta-1", "delta1", "delta-1", "epsilon",
         "alpha'", "beta'", "delta'", "kappa", "kappa'", "unit")


def _tri(s):
    return s * (s - 1) // 2


def _smax(N):
    """Largest s whose summand can survive precision N."""
    s = 1
    while (s - 1) * (s - 2) // 2 < N:
        s += 1
    return s


def _bound(N):
    """Quotient degree bound: kappa reaches curly degree about 2N."""
    return max(32, 2 * N + 4)


def _pdiv_one_plus_x(mask):
    """Exact quotient of a GF(2) polynomial by 1 + x."""
    q = 0
    while mask:
        d = mask.bit_length() - 1
        if d == 0:
            raise ArithmeticError("not divisible by 1 + x")
        q |= 1 << (d - 1)
        mask ^= (1 << d) | (1 << (d - 1))
    return q


def _sym_laurent(s, skip_zero=False, divide_by=False):
    """Exponents of x^(1-s) + ... + x^(s-1), optionally without x^0 and
    divided by 1 + x."""
    mask = 0
    for k in range(2 * s - 1):
        if skip_zero and k == s - 1:
            continue
        mask |= 1 << k
    if divide_by:
        mask = _pdiv_one_plus_x(mask)
    return [k - (s - 1) for k in range(mask.bit_length()) if mask >> k & 1]


def _idem0_from_laurent(exps, m, var):
    """x^k U^m with x = V (var 'V') or U_ (var 'U'), rewritten canonically."""
    out = []
    for k in exps:
        if var == "V":
            out.append((m, m + k))
        else:
            out.append((m + k, m))
    return out


def series(name: str, policy: Policy) -> Series:
    """The named series at the given precision."""
    N = policy.N
    S = _smax(N)
    t = []
    if name == "alpha":
        for s in range(1, S + 1):
            m = _tri(s)
            t += [(m + s, m), (m, m + s)]
        return Series(IDEM0, t, policy)
    if name in ("beta1", "beta-1"):
        var = "V" if name == "beta1" else "U"
        for s in range(1, S + 1):
            t += _idem0_from_laurent(_sym_laurent(s), _tri(s), var)
        return Series(IDEM0, t, policy)
    if name in ("delta1", "delta-1"):
        var = "V" if name == "delta1" else "U"
        for s in range(2, S + 1):
            t += _idem0_from_laurent(_sym_laurent(s, True, True), _tri(s), var)
        return Series(IDEM0, t, policy)
    if name == "epsilon":
        for s in range(1, S + 1):
            m = _tri(s)
            t += [(m + i, m + j) for i in range(s) for j in range(s)]
        return Series(IDEM0, t, policy)
    if name == "alpha'":
        return phi_sigma(series("alpha", policy))
    if name == "beta'":
        for s in range(1, S + 1):
            t += [(_tri(s), k) for k in _sym_laurent(s)]
        return Series(IDEM1, t, policy)
    if name == "delta'":
        for s in range(2, S + 1):
            t += [(_tri(s), k) for k in _sym_laurent(s, True, True)]
        return Series(IDEM1, t, policy)
    if name == "unit":
        return Series(PLAINU, [(_tri(s),) for s in range(1, S + 1)], policy)
    if name == "kappa":
        q = divide(kappa_numerator(policy), one0(policy) + series("alpha", policy), _bound(N))
        return _require(q, "kappa")
    if name == "kappa'":
        q = divide(series("beta'", policy) + unit_in(IDEM1, policy),
                   one1(policy) + series("alpha'", policy), _bound(N))
        return _require(q, "kappa'")
    raise KeyError(f"unknown series {name!r}; known: {', '.join(NAMES)}")


class SeriesIndivisible(ArithmeticError):
    def __init__(self, name, result: Indivisible):
        super().__init__(f"{name}: no quotient at U-level {result.level}")
        self.result = result


def _require(q, name):
    if isinstance(q, Indivisible):
        raise SeriesIndivisible(name, q)
    return q


def one0(p):
    return Series.one(IDEM0, p)


def one1(p):
    return Series.one(IDEM1, p)


def mono0(p, i, j):
    return Series.mono(IDEM0, p, i, j)


def mono1(p, u, t):
    return Series.mono(IDEM1, p, u, t)


def unit_in(ring, p):
    """Sum of U^(s(s-1)/2) in the given ring."""
    u = series("unit", p)
    if ring == PLAINU:
        return u
    if ring == IDEM0:
        return Series(IDEM0, [(k, k) for (k,) in u.terms], p)
    return Series(IDEM1, [(k, 0) for (k,) in u.terms], p)


def kappa_numerator(p):
    return series("beta1", p) + series("beta-1", p) + unit_in(IDEM0, p)


# ---------- factorization report


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class FactorizationReport:
    N: int
    core: list = field(default_factory=list)
    extra: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.ok for c in self.core + self.extra)

    def lines(self):
        return [f"{c.name:<34} N={self.N:<3} {'pass' if c.ok else 'FAIL'} {c.detail}".rstrip()
                for c in self.core + self.extra]


def _first_diff(a: Series, b: Series) -> str:
    d = a + b
    if not d:
        return ""
    from .coeff import render_mono

    m = min(d.terms, key=lambda m: (sum(m), m))
    return f"first differing monomial {render_mono(d.ring, m)}"


def _eq(name, a, b):
    return Check(name, a == b, _first_diff(a, b))


def check_factorizations(N: int) -> FactorizationReport:
    if N < 2:
        raise ValueError("N must be >= 2")
    p = UAdic(N)
    a = series("alpha", p)
    b1, bm1 = series("beta1", p), series("beta-1", p)
    d1, dm1 = series("delta1", p), series("delta-1", p)
    eps = series("epsilon", p)
    a1, b1p, d1p = series("alpha'", p), series("beta'", p), series("delta'", p)
    one, T = one1(p), mono1(p, 0, 1)
    U_, V_ = mono0(p, 1, 0), mono0(p, 0, 1)
    u0, u1 = unit_in(IDEM0, p), unit_in(IDEM1, p)
    ap = one0(p) + a
    r = FactorizationReport(N)
    r.core.append(_eq("1+alpha = (1+V)beta1", ap, (one0(p) + V_) * b1))
    r.core.append(_eq("1+alpha = (1+U)beta-1", ap, (one0(p) + U_) * bm1))
    try:
        inv = invert(eps)
        r.core.append(Check("epsilon is a unit", inv * eps == 1))
    except ArithmeticError as e:
        r.core.append(Check("epsilon is a unit", False, str(e)))
    r.core.append(_eq("1+alpha = (1+U)(1+V)epsilon", ap, (one0(p) + U_) * (one0(p) + V_) * eps))
    r.core.append(_eq("beta-1 = (1+V)epsilon", bm1, (one0(p) + V_) * eps))
    r.core.append(_eq("beta1 = (1+U)epsilon", b1, (one0(p) + U_) * eps))
    r.core.append(_eq("beta1 + unit = (1+V)delta1", b1 + u0, (one0(p) + V_) * d1))
    r.core.append(_eq("beta-1 + unit = (1+U)delta-1", bm1 + u0, (one0(p) + U_) * dm1))
    ps, pt = phi_sigma(b1), phi_tau(bm1)
    r.core.append(Check("phi_s(beta1) = phi_t(beta-1) = beta'", ps == b1p and pt == b1p,
                        _first_diff(ps, b1p) or _first_diff(pt, b1p)))
    r.core.append(_eq("1+alpha' = (1+T)beta'", one + a1, (one + T) * b1p))
    r.core.append(_eq("delta'(1+T) = beta' + unit", d1p * (one + T), b1p + u1))
    Tinv = mono1(p, 0, -1)
    r.extra.append(_eq("phi_t(1+alpha) = T^-1(1+alpha')", phi_tau(ap), Tinv * (one + a1)))
    r.extra.append(Check("beta' is a unit", is_unit(b1p)))
    for nm in ("kappa", "kappa'"):
        try:
            k = series(nm, p)
            lhs = k * (ap if nm == "kappa" else one + a1)
            rhs = kappa_numerator(p) if nm == "kappa" else b1p + u1
            r.extra.append(_eq(f"{nm} exists and re-multiplies", lhs, rhs))
            base = one0(p) if nm == "kappa" else one
            r.extra.append(_eq(f"{nm} = 1 mod U", k.mod_u(), base))
        except SeriesIndivisible as e:
            r.extra.append(Check(f"{nm} exists and re-multiplies", False, str(e)))
    return r


# ---------- tile identities


def _poly(pairs):
    out = set()
    for m in pairs:
        out ^= {m}
    return frozenset(out)


def _pmul(a, b):
    out = set()
    for x in a:
        for y in b:
            out ^= {(x[0] + y[0], x[1] + y[1])}
    return frozenset(out)


def tile_b(s, sign, reading="expanded"):
    """B_s^+ or B_s^-.

    ``expanded`` expands the four summands over F, so tiles listed
    twice cancel; ``tiles`` takes the union of the listed tiles (the
    boundary-tile description).
    """
    t = []
    if sign == "+":
        t += [(i, 0) for i in range(0, s + 1)]
    else:
        t += [(i, 0) for i in range(1, s + 1)]
    t += [(0, j) for j in range(1, s + 1)]
    t += [(s, j) for j in range(0, s)]
    if sign == "+":
        t += [(i, s) for i in range(0, s + 1)]
    else:
        t += [(i, s) for i in range(0, s)]
    if reading == "tiles":
        return frozenset(t)
    if reading != "expanded":
        raise ValueError(f"unknown reading {reading!r}")
    return _poly(t)


def tile_factored(s, parity):
    box = _pmul(_poly([(0, 0), (1, 0)]), _poly([(0, 0), (0, 1)]))
    inner = _poly([(i, j) for i in range(s) for j in range(s) if (i + j) % 2 == parity])
    return _pmul(box, inner)


def _render_poly(p):
    from .coeff import render_mono

    if not p:
        return "0"
    return " + ".join(render_mono(IDEM0, m) for m in sorted(p, key=lambda m: (sum(m), m)))


def _b1b1_rhs(p, form, reading="expanded"):
    S = _smax(p.N)
    t = []
    for s in range(1, S + 1):
        m = _tri(s)
        if form == "sum":
            a = _poly([(i, 0) for i in range(s)])
            b = _poly([(0, j) for j in range(s)])
            poly = _poly([(0, 0)]) ^ _pmul(_poly([(0, 0), (s, 0)]), b) ^ _pmul(a, _poly([(0, 0), (0, s)]))
        else:
            poly = tile_b(s, "+" if s % 2 else "-", reading)
        t += [(i + m, j + m) for i, j in poly]
    return Series(IDEM0, t, p)


@dataclass
class TileRow:
    s: int
    identity: str
    reading: str
    ok: bool
    lhs: str = ""
    rhs: str = ""


def tile_identity_check(s_max: int, readings=("expanded", "tiles")) -> list:
    """Per-s verdicts under each reading of B_s^+/-.

    The summed identities are checked through U-level ``s(s-1)/2``, below
    which every contributing summand is included.
    """
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    rows = []
    for s in range(1, s_max + 1):
        p = UAdic(max(1, _tri(s)))
        lhs = kappa_numerator(p)
        rhs = _b1b1_rhs(p, "sum")
        rows.append(TileRow(s, "b1b1sum", "-", lhs == rhs, *_diff_strs(lhs, rhs)))
        for reading in readings:
            rhs = _b1b1_rhs(p, "tiles", reading)
            rows.append(TileRow(s, "b1b1-sum", reading, lhs == rhs, *_diff_strs(lhs, rhs)))
            if s % 2:
                b, f, nm = tile_b(s, "+", reading), tile_factored(s, 0), "Bs-factor-1"
            else:
                b, f, nm = tile_b(s, "-", reading), tile_factored(s, 1), "Bs-factor-2"
            rows.append(TileRow(s, nm, reading, b == f, _render_poly(b), _render_poly(f)))
    return rows


def _diff_strs(a, b):
    return ("", "") if a == b else (str(a), str(b))


def total_sum_mod_u_check(N: int = 8) -> bool:
    p = UAdic(N)
    one = one0(p)
    return kappa_numerator(p).mod_u() == one + mono0(p, 1, 0) + mono0(p, 0, 1)


# ---------- the triangle


NINE = ("d(f1) = 0", "d(F1) = 0", "d(G1) = 0",
        "G1 F1 + unit id = d(h1)", "F1 G1 + unit id = d(j1)",
        "(1+UT^-1) inverse", "(1+UT) inverse", "(1+T^(n+1))/(1+T)", "unit = 1 + U r")


@dataclass
class TriangleWitness:
    n: int
    N: int
    policy: Policy
    cone: TypeDModule
    dinf: TypeDModule
    f1: DMorphism
    F1: DMorphism
    G1: DMorphism
    h1: DMorphism
    j1: DMorphism
    results: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(v == "" for v in self.results.values())

    def first_failure(self):
        for k in NINE:
            if self.results.get(k):
                return k, self.results[k]
        return None

    def lines(self):
        return [f"{k:<28} n={self.n:<3} N={self.N:<3} {'pass' if not v else 'FAIL ' + v}"
                for k, v in ((k, self.results.get(k, "")) for k in NINE)]


def _el(s: Series, kind=None) -> Elem:
    return from_series(s, kind)


def _sum(*es):
    out = es[0]
    for e in es[1:]:
        out = out + e
    return out


def triangle_data(n: int, policy: Policy):
    p = policy
    dn = make_dn(n, p).renamed({"x0": "X0", "x1": "X1"}.get)
    dn1 = make_dn(n + 1, p).renamed({"x0": "Y0", "x1": "Y1"}.get)
    one, T = one1(p), mono1(p, 0, 1)
    a = series("alpha", p)
    a1 = phi_sigma(a)
    f1 = DMorphism(dn, dn1, {
        ("X0", "Y0"): _el(one0(p) + a),
        ("X1", "Y1"): _el(one + a1),
    })
    c = cone(f1, check=False)
    dinf = make_dinfty(p)
    b1, bm1, b1p = series("beta1", p), series("beta-1", p), series("beta'", p)
    quot = divide(one + mono1(p, 0, n + 1), one + T)
    inv_minus = invert(one + mono1(p, 1, -1))
    inv_plus = invert(one + mono1(p, 1, 1))
    coeffs = {"quot": quot, "inv_minus": inv_minus, "inv_plus": inv_plus}
    qt = Series.zero(IDEM1, p) if isinstance(quot, Indivisible) else quot
    F1 = DMorphism(c, dinf, {
        ("X0", "x0+"): _el(bm1),
        ("X0", "y0+"): _el(b1),
        ("Y0", "x0-"): _el(one0(p)),
        ("Y0", "y0-"): _el(one0(p)),
        ("Y0", "z1+"): _el(qt, "t"),
        ("X1", "z1+"): _el(b1p),
        ("Y1", "z1-"): _el(one),
    })
    G1 = DMorphism(dinf, c, {
        ("x0-", "Y0"): _el(bm1),
        ("x0-", "X1"): _el(inv_minus, "s") + _el(qt, "t"),
        ("x0+", "X0"): _el(one0(p)),
        ("y0-", "Y0"): _el(b1),
        ("y0-", "X1"): _el(mono1(p, 0, n) * inv_plus, "t"),
        ("y0+", "X0"): _el(one0(p)),
        ("z1-", "Y1"): _el(b1p),
        ("z1+", "X1"): _el(one),
    })
    h1 = DMorphism(c, c, {
        ("Y0", "X0"): _el(series("kappa", p)),
        ("Y1", "X1"): _el(series("kappa'", p)),
    })
    j1 = DMorphism(dinf, dinf, {
        ("x0-", "x0+"): _el(series("delta-1", p)),
        ("x0-", "y0+"): _el(series("epsilon", p)),
        ("y0-", "y0+"): _el(series("delta1", p)),
        ("y0-", "x0+"): _el(series("epsilon", p)),
        ("z1-", "z1+"): _el(series("delta'", p)),
    })
    return c, dinf, f1, F1, G1, h1, j1, coeffs


def verify_triangle(n: int, N: int) -> TriangleWitness:
    if N < 2:
        raise ValueError("N must be >= 2")
    p = UAdic(N)
    c, dinf, f1, F1, G1, h1, j1, co = triangle_data(n, p)
    w = TriangleWitness(n, N, p, c, dinf, f1, F1, G1, h1, j1)
    R = w.results
    R["d(f1) = 0"] = morphism_differential(f1).describe()
    R["d(F1) = 0"] = morphism_differential(F1).describe()
    R["d(G1) = 0"] = morphism_differential(G1).describe()
    u = series("unit", p)
    R["G1 F1 + unit id = d(h1)"] = verify_homotopy(F1, G1, h1, identity(c, u)).describe()
    R["F1 G1 + unit id = d(j1)"] = verify_homotopy(G1, F1, j1, identity(dinf, u)).describe()
    one = one1(p)
    R["(1+UT^-1) inverse"] = "" if co["inv_minus"] * (one + mono1(p, 1, -1)) == 1 else "product is not 1"
    R["(1+UT) inverse"] = "" if co["inv_plus"] * (one + mono1(p, 1, 1)) == 1 else "product is not 1"
    q = co["quot"]
    if isinstance(q, Indivisible):
        R["(1+T^(n+1))/(1+T)"] = f"indivisible at level {q.level}"
    else:
        ok = q * (one + mono1(p, 0, 1)) == one + mono1(p, 0, n + 1)
        R["(1+T^(n+1))/(1+T)"] = "" if ok else "re-multiplication differs"
    R["unit = 1 + U r"] = "" if u.mod_u() == Series.one(PLAINU, p) else "constant term is not 1"
    return w


def alpha_window(N: int) -> int:
    """Smallest chiral half-width holding every term of alpha below U-level N."""
    return max(_tri(s) + s for s in range(1, _smax(N) + 1) if _tri(s) < N)


def chiral_cross_check(n: int, W: int = 8, N: int = 8):
    """Reduce the cone and the infinity-framed torus in chiral mode and
    match the minimal models up to unit rescaling.

    The window is widened to :func:`alpha_window` when needed, since a
    narrower window cuts alpha but not its image under phi_sigma and the
    cone map stops being a cycle.  Returns ``(reduced cone, reduced D_inf,
    isomorphism or None, window used)``.
    """
    W = max(W, alpha_window(N))
    p = ChiralWindow(W, N)
    dn = make_dn(n, p).renamed({"x0": "X0", "x1": "X1"}.get)
    dn1 = make_dn(n + 1, p).renamed({"x0": "Y0", "x1": "Y1"}.get)
    a = series("alpha", p)
    f1 = DMorphism(dn, dn1, {
        ("X0", "Y0"): _el(one0(p) + a),
        ("X1", "Y1"): _el(one1(p) + phi_sigma(a)),
    })
    rc = reduce(cone(f1)).reduced
    rd = reduce(make_dinfty(p)).reduced
    return rc, rd, find_isomorphism(rc, rd, max_gens=2, scaled=True), W
