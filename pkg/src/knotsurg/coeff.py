"""Truncated coefficient rings over GF(2).

Three rings are supported:

* ``IDEM0``: F[U_, V_] (curly U and V), with U = U_ V_.  Monomials are ``(i, j)``.
* ``IDEM1``: F[U, T, T^-1].  Monomials are ``(u, t)``.
* ``PLAINU``: F[U].  Monomials are ``(k,)``.

A :class:`Policy` decides which monomials survive.  Every policy discards an
ideal, so truncation commutes with products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

IDEM0 = "idem0"
IDEM1 = "idem1"
PLAINU = "plainu"
RINGS = (IDEM0, IDEM1, PLAINU)


class RingMismatch(ValueError):
    pass


class NotAUnit(ArithmeticError):
    def __init__(self, criterion: str, value=None):
        super().__init__(criterion)
        self.criterion = criterion
        self.value = value


@dataclass(frozen=True)
class Indivisible:
    """Result of a failed division: ``level`` is the first bad U-level."""

    level: int
    residue: "Series | None" = None

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Policy:
    """Truncation policy.

    ``uadic``: keep monomials of U-level below N.
    ``chiral``: additionally keep IDEM0 monomials only when both curly
    exponents are at most W.  IDEM1 and PLAINU are truncated U-adically.
    """

    mode: str
    N: int
    W: int | None = None

    def __post_init__(self):
        if self.mode not in ("uadic", "chiral"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.mode == "chiral" and (self.W is None or self.W < 0):
            raise ValueError("chiral policy needs W >= 0")
        if self.mode == "uadic" and self.W is not None:
            object.__setattr__(self, "W", None)

    @property
    def chiral(self) -> bool:
        return self.mode == "chiral"

    def keep(self, ring: str, m: tuple) -> bool:
        if ring == IDEM0:
            i, j = m
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in {m}")
            if min(i, j) >= self.N:
                return False
            return not self.chiral or max(i, j) <= self.W
        if m[0] < 0:
            raise ValueError(f"negative U exponent in {m}")
        return m[0] < self.N

    def __str__(self):
        if self.chiral:
            return f"chiral W={self.W} N={self.N}"
        return f"uadic N={self.N}"


def UAdic(N: int) -> Policy:
    return Policy("uadic", N)


def ChiralWindow(W: int, N: int) -> Policy:
    return Policy("chiral", N, W)


def ulevel(ring: str, m: tuple) -> int:
    if ring == IDEM0:
        return min(m)
    return m[0]


def alexander(ring: str, m: tuple) -> int:
    if ring == IDEM0:
        return m[1] - m[0]
    if ring == IDEM1:
        return m[1]
    return 0


def grw(ring: str, m: tuple) -> int:
    return -2 * m[0]


def grz(ring: str, m: tuple) -> int:
    if ring == IDEM0:
        return -2 * m[1]
    return -2 * m[0]


def mono_mul(ring: str, a: tuple, b: tuple) -> tuple:
    if ring == PLAINU:
        return (a[0] + b[0],)
    return (a[0] + b[0], a[1] + b[1])


def _unit(ring):
    return (0,) if ring == PLAINU else (0, 0)


class Series:
    """Immutable finite GF(2) sum of monomials in one ring under one policy."""

    __slots__ = ("ring", "terms", "policy", "_hash")

    def __init__(self, ring: str, terms: Iterable[tuple], policy: Policy):
        if ring not in RINGS:
            raise ValueError(f"unknown ring {ring!r}")
        acc = set()
        for m in terms:
            m = tuple(m)
            if policy.keep(ring, m):
                acc ^= {m}
        self.ring = ring
        self.terms = frozenset(acc)
        self.policy = policy
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms, policy):
        s = cls.__new__(cls)
        s.ring = ring
        s.terms = terms
        s.policy = policy
        s._hash = None
        return s

    @classmethod
    def zero(cls, ring, policy):
        return cls._raw(ring, frozenset(), policy)

    @classmethod
    def one(cls, ring, policy):
        return cls(ring, [_unit(ring)], policy)

    @classmethod
    def mono(cls, ring, policy, *exps):
        return cls(ring, [tuple(exps)], policy)

    def _check(self, other):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if other.policy != self.policy:
            raise RingMismatch(f"policy {self.policy} vs {other.policy}")

    def __add__(self, other):
        if isinstance(other, int) and other in (0, 1):
            other = Series.one(self.ring, self.policy) if other else Series.zero(self.ring, self.policy)
        self._check(other)
        return Series._raw(self.ring, self.terms ^ other.terms, self.policy)

    __radd__ = __add__
    __sub__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    def __pow__(self, k: int):
        out = Series.one(self.ring, self.policy)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int) and other in (0, 1):
            return self.terms == (frozenset([_unit(self.ring)]) if other else frozenset())
        if not isinstance(other, Series):
            return NotImplemented
        return (self.ring, self.terms, self.policy) == (other.ring, other.terms, other.policy)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.terms, self.policy))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms))

    def __repr__(self):
        return f"Series({render(self)!r}, {self.ring}, {self.policy})"

    def __str__(self):
        return render(self)

    def with_policy(self, policy: Policy) -> "Series":
        return Series(self.ring, self.terms, policy)

    def min_ulevel(self) -> int | None:
        if not self.terms:
            return None
        return min(ulevel(self.ring, m) for m in self.terms)

    def level(self, L: int) -> "Series":
        return Series._raw(self.ring, frozenset(m for m in self.terms if ulevel(self.ring, m) == L), self.policy)

    def mod_u(self) -> "Series":
        return self.level(0)

    def homogeneous_alexander(self):
        vals = {alexander(self.ring, m) for m in self.terms}
        return vals.pop() if len(vals) == 1 else None


def mul(a: Series, b: Series) -> Series:
    a._check(b)
    ring, pol = a.ring, a.policy
    acc = set()
    keep = pol.keep
    if ring == PLAINU:
        for (x,) in a.terms:
            for (y,) in b.terms:
                m = (x + y,)
                if keep(ring, m):
                    acc ^= {m}
    else:
        for x0, x1 in a.terms:
            for y0, y1 in b.terms:
                m = (x0 + y0, x1 + y1)
                if keep(ring, m):
                    acc ^= {m}
    return Series._raw(ring, frozenset(acc), pol)


def unit_check(a: Series):
    """Return None if ``a`` is a unit, else the failing criterion text."""
    if not a.terms:
        return "zero is not a unit"
    ring, pol = a.ring, a.policy
    if ring == IDEM0 and pol.chiral:
        if (0, 0) not in a.terms:
            return "chiral: coefficient of 1 must be 1"
        return None
    low = a.level(0).terms
    if ring == IDEM1:
        if len(low) != 1:
            return "U-adic: U^0 part must be a single T^k"
        return None
    if low != frozenset([_unit(ring)]):
        return "U-adic: U^0 part must equal 1"
    return None


def is_unit(a: Series) -> bool:
    return unit_check(a) is None


def _fixed_point(one: Series, r: Series, cap: int) -> Series:
    # x = 1 + r x, iterated until stable
    x = one
    for _ in range(cap):
        nxt = one + r * x
        if nxt == x:
            return x
        x = nxt
    raise NotAUnit("inverse did not stabilize within iteration cap", x)


def invert(a: Series) -> Series:
    why = unit_check(a)
    if why is not None:
        raise NotAUnit(why, a)
    ring, pol = a.ring, a.policy
    one = Series.one(ring, pol)
    cap = 4 * (pol.N + (pol.W or 0)) + 8
    if ring == IDEM1:
        (k,) = [t for (u, t) in a.level(0).terms]
        shift = Series.mono(ring, pol, 0, -k)
        b = a * shift
        return _fixed_point(one, b + one, cap) * shift
    return _fixed_point(one, a + one, cap)


# ---------- division


def _mono_degree(ring, m):
    return m[0] + m[1] if ring == IDEM0 else m[0]


def _laurent(terms):
    # dict level -> (mask, offset) for IDEM1; PLAINU uses T-exponent 0
    out = {}
    for m in terms:
        t = m[1] if len(m) > 1 else 0
        out.setdefault(m[0], set()).symmetric_difference_update({t})
    return out


def _poly(ts):
    if not ts:
        return 0, 0
    lo = min(ts)
    mask = 0
    for t in ts:
        mask ^= 1 << (t - lo)
    return mask, lo


def _unpoly(mask, lo):
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out.add(i + lo)
        mask >>= 1
        i += 1
    return out


def _clmul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pdivmod(n, d):
    q = 0
    dl = d.bit_length()
    while n.bit_length() >= dl:
        s = n.bit_length() - dl
        q ^= 1 << s
        n ^= d << s
    return q, n


def _laurent_div(ts_n, ts_d):
    """Exact division of Laurent polynomials in T, or None."""
    if not ts_n:
        return set()
    n, ln = _poly(ts_n)
    d, ld = _poly(ts_d)
    q, r = _pdivmod(n, d)
    if r:
        return None
    return _unpoly(q, ln - ld)


def _divide_laurent(num: Series, den: Series, bound: int):
    ring, pol = num.ring, num.policy
    N = pol.N
    nl = _laurent(num.terms)
    dl = _laurent(den.terms)
    d0lev = min(dl)
    d0 = dl[d0lev]
    for L in nl:
        if L < d0lev and nl[L]:
            return Indivisible(L)
    q = {}
    # quotient level L pairs with dividend level L + d0lev
    for L in range(N - d0lev):
        target = set(nl.get(L + d0lev, set()))
        for e, de in dl.items():
            if e == d0lev or L + d0lev - e < 0:
                continue
            prev = q.get(L + d0lev - e)
            if not prev:
                continue
            n_, lo1 = _poly(prev)
            d_, lo2 = _poly(de)
            target ^= _unpoly(_clmul(n_, d_), lo1 + lo2)
        ql = _laurent_div(target, d0)
        if ql is None:
            return Indivisible(L + d0lev)
        if ql:
            q[L] = ql
    terms = []
    for L, ts in q.items():
        for t in ts:
            if ring == PLAINU:
                terms.append((L,))
            else:
                if abs(t) > bound:
                    return Indivisible(L)
                terms.append((L, t))
    return Series(ring, terms, pol)


def _divide_power(num: Series, den: Series, bound: int):
    """Pull recursion in F[[U_, V_]] when the lowest part of ``den`` is one monomial."""
    ring, pol = num.ring, num.policy
    degs = {}
    for m in den.terms:
        degs.setdefault(_mono_degree(ring, m), []).append(m)
    low = min(degs)
    if len(degs[low]) != 1:
        return None
    m0 = degs[low][0]
    rest = [e for e in den.terms if e != m0]
    q = set()
    nt = num.terms
    pts = [(i, j) for i in range(bound + 1) for j in range(bound + 1) if pol.keep(ring, (i, j))]
    pts.sort(key=lambda m: (m[0] + m[1], m))
    for (i, j) in pts:
        p = (i + m0[0], j + m0[1])
        c = p in nt
        for e in rest:
            a, b = p[0] - e[0], p[1] - e[1]
            if a >= 0 and b >= 0 and (a, b) in q:
                c = not c
        if c:
            q.add((i, j))
    return Series(ring, q, pol)


def _divide_linear(num: Series, den: Series, bound: int):
    """GF(2) linear solve ordered by U-level of the equations."""
    ring, pol = num.ring, num.policy
    unknowns = [(i, j) for i in range(bound + 1) for j in range(bound + 1) if pol.keep(ring, (i, j))]
    col = {m: k for k, m in enumerate(unknowns)}
    rows = {}
    for m, k in col.items():
        for e in den.terms:
            p = mono_mul(ring, m, e)
            if pol.keep(ring, p):
                rows[p] = rows.get(p, 0) ^ (1 << k)
    for p in num.terms:
        rows.setdefault(p, 0)
    rhs_bit = 1 << len(unknowns)
    eqs = sorted(rows, key=lambda p: (ulevel(ring, p), p))
    piv = {}
    for p in eqs:
        r = rows[p] | (rhs_bit if p in num.terms else 0)
        while True:
            low = r & (rhs_bit - 1)
            if not low:
                break
            b = low.bit_length() - 1
            if b in piv:
                r ^= piv[b]
            else:
                piv[b] = r
                break
        if r == rhs_bit:
            return Indivisible(ulevel(ring, p))
    # back substitution with free variables set to zero
    sol = 0
    for b in sorted(piv):
        r = piv[b]
        rest = r & ((1 << b) - 1)
        v = 1 if r & rhs_bit else 0
        v ^= bin(rest & sol).count("1") & 1
        if v:
            sol |= 1 << b
    return Series(ring, [m for m, k in col.items() if sol >> k & 1], pol)


def divide(dividend: Series, divisor: Series, degree_bound: int = 32):
    """Solve ``q * divisor = dividend`` at the policy's precision.

    Returns a Series, or an :class:`Indivisible` naming the first U-level at
    which no solution exists.  Every success is re-verified by multiplication.
    """
    dividend._check(divisor)
    ring = dividend.ring
    if not divisor.terms:
        return Indivisible(0)
    if ring in (IDEM1, PLAINU):
        q = _divide_laurent(dividend, divisor, degree_bound)
    else:
        q = _divide_power(dividend, divisor, degree_bound)
        if q is None or q * divisor != dividend:
            q = _divide_linear(dividend, divisor, degree_bound)
    if isinstance(q, Indivisible):
        return q
    res = q * divisor + dividend
    if res:
        return Indivisible(res.min_ulevel(), res)
    return q


# ---------- text


def render_mono(ring: str, m: tuple) -> str:
    if ring == IDEM0:
        names = ("U", "V")
    elif ring == IDEM1:
        names = ("u", "T")
    else:
        names = ("u",)
    parts = [f"{n}^{e}" for n, e in zip(names, m) if e != 0]
    return "*".join(parts) if parts else "1"


def mono_key(ring, m):
    return (ulevel(ring, m), m)


def render(s: Series) -> str:
    if not s.terms:
        return "0"
    return " + ".join(render_mono(s.ring, m) for m in sorted(s.terms, key=lambda m: mono_key(s.ring, m)))


def parse_mono(ring: str, text: str) -> tuple:
    text = text.strip()
    if ring == IDEM0:
        names = {"U": 0, "V": 1}
        exps = [0, 0]
    elif ring == IDEM1:
        names = {"u": 0, "U": 0, "T": 1}
        exps = [0, 0]
    else:
        names = {"u": 0, "U": 0}
        exps = [0]
    if text == "1":
        return tuple(exps)
    for fac in text.split("*"):
        fac = fac.strip()
        name, _, e = fac.partition("^")
        name = name.strip()
        if name not in names:
            raise ValueError(f"unknown factor {fac!r} for ring {ring}")
        exps[names[name]] += int(e) if e else 1
    return tuple(exps)


def parse_series(ring: str, text: str, policy: Policy) -> Series:
    text = text.strip()
    if text == "0":
        return Series.zero(ring, policy)
    return Series(ring, [parse_mono(ring, t) for t in text.split("+")], policy)
