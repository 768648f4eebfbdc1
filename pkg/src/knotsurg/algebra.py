"""The knot surgery algebra and its tensor powers.

A term is ``(kind, a, b)``:

* ``'0'``: curly monomial U_^a V_^b in idempotent 0.
* ``'1'``: U^a T^b in idempotent 1.
* ``'s'`` / ``'t'``: U^a T^b sigma (resp. tau), from idempotent 0 to 1.

Left idempotent of ``s``/``t`` is 1 and right idempotent is 0.  Products
push sigma and tau past idempotent-0 bodies via ``phi_sigma``/``phi_tau``.
An :class:`Elem` is a GF(2)-sum of pure tensors of terms.
"""

from __future__ import annotations

from typing import Iterable

from .coeff import IDEM0, IDEM1, Policy, Series, render_mono, parse_mono

KINDS = ("0", "1", "s", "t")
LEFT = {"0": 0, "1": 1, "s": 1, "t": 1}
RIGHT = {"0": 0, "1": 1, "s": 0, "t": 0}


class NonHomogeneous:
    """Marker for a grading that differs between terms."""

    def __init__(self, values):
        self.values = tuple(sorted(values))

    def __repr__(self):
        return f"NonHomogeneous{self.values}"

    def __eq__(self, other):
        return isinstance(other, NonHomogeneous) and self.values == other.values

    def __hash__(self):
        return hash(self.values)


def phi_sigma_mono(i, j):
    return (i, j - i)


def phi_tau_mono(i, j):
    return (j, j - i)


def term_keep(term, policy: Policy) -> bool:
    k, a, b = term
    if k == "0":
        return policy.keep(IDEM0, (a, b))
    return policy.keep(IDEM1, (a, b))


def term_mul(x, y):
    """Product x*y of two terms, or None."""
    kx, a, b = x
    ky, c, d = y
    if kx == "0":
        return ("0", a + c, b + d) if ky == "0" else None
    if kx == "1":
        if ky == "0":
            return None
        return (ky, a + c, b + d)
    # x is s or t, needs an idempotent-0 body on the right
    if ky != "0":
        return None
    if kx == "s":
        u, t = phi_sigma_mono(c, d)
    else:
        u, t = phi_tau_mono(c, d)
    return (kx, a + u, b + t)


def term_ulevel(term):
    k, a, b = term
    return min(a, b) if k == "0" else a


def term_alexander(term):
    k, a, b = term
    return b - a if k == "0" else b


def term_grw(term):
    return -2 * term[1]


def term_grz(term):
    k, a, b = term
    return -2 * b if k == "0" else -2 * a


def term_idems(term):
    return LEFT[term[0]], RIGHT[term[0]]


class Elem:
    """Immutable GF(2)-sum of pure tensors of algebra terms."""

    __slots__ = ("arity", "terms", "policy", "_hash")

    def __init__(self, arity: int, terms: Iterable[tuple], policy: Policy):
        acc = set()
        for t in terms:
            t = tuple(t)
            if len(t) != arity:
                raise ValueError(f"pure tensor {t} has wrong arity (want {arity})")
            if all(term_keep(x, policy) for x in t):
                if t in acc:
                    acc.discard(t)
                else:
                    acc.add(t)
        self.arity = arity
        self.terms = frozenset(acc)
        self.policy = policy
        self._hash = None

    @classmethod
    def _raw(cls, arity, terms, policy):
        e = cls.__new__(cls)
        e.arity = arity
        e.terms = terms
        e.policy = policy
        e._hash = None
        return e

    @classmethod
    def zero(cls, arity, policy):
        return cls._raw(arity, frozenset(), policy)

    @classmethod
    def idem(cls, idems: tuple, policy):
        return cls(len(idems), [tuple(("0", 0, 0) if i == 0 else ("1", 0, 0) for i in idems)], policy)

    @classmethod
    def single(cls, policy, *terms):
        return cls(len(terms), [tuple(terms)], policy)

    def _check(self, other):
        if not isinstance(other, Elem):
            raise TypeError(f"expected Elem, got {type(other).__name__}")
        if other.arity != self.arity:
            raise ValueError(f"arity {self.arity} vs {other.arity}")
        if other.policy != self.policy:
            raise ValueError(f"policy {self.policy} vs {other.policy}")

    def __add__(self, other):
        self._check(other)
        return Elem._raw(self.arity, self.terms ^ other.terms, self.policy)

    __sub__ = __add__

    def __mul__(self, other):
        return alg_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, Elem):
            return NotImplemented
        return (self.arity, self.terms, self.policy) == (other.arity, other.terms, other.policy)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, self.terms, self.policy))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"Elem({render(self)!r})"

    def __str__(self):
        return render(self)

    def idempotents(self):
        """Set of (left, right) idempotent vectors over all pure tensors."""
        out = set()
        for t in self.terms:
            out.add((tuple(LEFT[x[0]] for x in t), tuple(RIGHT[x[0]] for x in t)))
        return out

    def min_ulevel(self):
        if not self.terms:
            return None
        return min(min(term_ulevel(x) for x in t) for t in self.terms)

    def with_policy(self, policy):
        return Elem(self.arity, self.terms, policy)

    def factor(self, k):
        """Element obtained by keeping only factor ``k`` (arity-1 view)."""
        return Elem(1, [(t[k],) for t in self.terms], self.policy)


def alg_mul(a: Elem, b: Elem) -> Elem:
    """Product a*b; pure tensors multiply factorwise, mismatches give 0."""
    a._check(b)
    pol = a.policy
    acc = set()
    for x in a.terms:
        for y in b.terms:
            out = []
            for p, q in zip(x, y):
                r = term_mul(p, q)
                if r is None or not term_keep(r, pol):
                    break
                out.append(r)
            else:
                t = tuple(out)
                if t in acc:
                    acc.discard(t)
                else:
                    acc.add(t)
    return Elem._raw(a.arity, frozenset(acc), pol)


def phi_sigma(a: Series) -> Series:
    if a.ring != IDEM0:
        raise ValueError("phi_sigma needs an idempotent-0 series")
    return Series(IDEM1, [phi_sigma_mono(i, j) for i, j in a.terms], a.policy)


def phi_tau(a: Series) -> Series:
    if a.ring != IDEM0:
        raise ValueError("phi_tau needs an idempotent-0 series")
    return Series(IDEM1, [phi_tau_mono(i, j) for i, j in a.terms], a.policy)


def from_series(s: Series, kind: str | None = None) -> Elem:
    """Arity-1 element from a series; ``kind`` in {None, 's', 't'}."""
    if s.ring == IDEM0:
        if kind is not None:
            raise ValueError("decorations need an idempotent-1 body")
        return Elem(1, [(("0", i, j),) for i, j in s.terms], s.policy)
    if s.ring != IDEM1:
        raise ValueError("plain U series are not algebra elements")
    k = kind or "1"
    return Elem(1, [((k, u, t),) for u, t in s.terms], s.policy)


def to_series(e: Elem, kind: str | None = None) -> Series:
    """Inverse of :func:`from_series` for arity-1 elements of one kind."""
    if e.arity != 1:
        raise ValueError("to_series needs arity 1")
    kinds = {t[0][0] for t in e.terms}
    if not kinds:
        if kind is None or kind == "0":
            return Series.zero(IDEM0 if kind == "0" else IDEM1, e.policy)
        return Series.zero(IDEM1, e.policy)
    if len(kinds) != 1:
        raise ValueError(f"mixed kinds {kinds}")
    k = kinds.pop()
    if kind is not None and k != kind:
        raise ValueError(f"expected kind {kind}, got {k}")
    ring = IDEM0 if k == "0" else IDEM1
    return Series(ring, [(t[0][1], t[0][2]) for t in e.terms], e.policy)


def split_kinds(e: Elem) -> dict:
    """Arity-1 element split by kind into series."""
    out = {}
    for (x,) in e.terms:
        out.setdefault(x[0], set()).add((x[1], x[2]))
    res = {}
    for k, ms in out.items():
        res[k] = Series(IDEM0 if k == "0" else IDEM1, ms, e.policy)
    return res


def gradings(a: Elem):
    """(alexander, grw, grz), each an int or :class:`NonHomogeneous`.

    Gradings of a pure tensor add over its factors.  Sigma and tau carry 0.
    """
    vals = ([], [], [])
    for t in a.terms:
        vals[0].append(sum(term_alexander(x) for x in t))
        vals[1].append(sum(term_grw(x) for x in t))
        vals[2].append(sum(term_grz(x) for x in t))
    out = []
    for v in vals:
        s = set(v)
        if len(s) == 1:
            out.append(s.pop())
        elif not s:
            out.append(None)
        else:
            out.append(NonHomogeneous(s))
    return tuple(out)


def alexander_vector(a: Elem):
    """Per-factor Alexander gradings if homogeneous, else None."""
    vecs = {tuple(term_alexander(x) for x in t) for t in a.terms}
    return vecs.pop() if len(vecs) == 1 else None


# ---------- text


def render_term(term) -> str:
    k, a, b = term
    if k == "0":
        return render_mono(IDEM0, (a, b))
    body = render_mono(IDEM1, (a, b))
    if k == "1":
        return body
    return k if body == "1" else f"{body}*{k}"


def _term_key(term):
    return (KINDS.index(term[0]), term_ulevel(term), term[1], term[2])


def tensor_key(t):
    return tuple(_term_key(x) for x in t)


def render(a: Elem) -> str:
    if not a.terms:
        return "0"
    return " + ".join(" | ".join(render_term(x) for x in t) for t in sorted(a.terms, key=tensor_key))


def parse_term(text: str, left: int, right: int):
    """Parse one monomial term given the idempotents it must connect."""
    text = text.strip()
    facs = [f.strip() for f in text.split("*")]
    deco = None
    if facs[-1] in ("s", "t"):
        deco = facs.pop()
    if any(f in ("s", "t") for f in facs):
        raise ValueError(f"decoration must come last in {text!r}")
    body = "*".join(facs) if facs else "1"
    if deco is not None:
        if (left, right) != (1, 0):
            raise ValueError(f"{deco} needs idempotents (1, 0), got ({left}, {right})")
        u, t = parse_mono(IDEM1, body)
        return (deco, u, t)
    if left != right:
        raise ValueError(f"undecorated term {text!r} needs equal idempotents")
    if left == 0:
        i, j = parse_mono(IDEM0, body)
        return ("0", i, j)
    u, t = parse_mono(IDEM1, body)
    return ("1", u, t)


def _split_top(text: str, sep: str):
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError("unbalanced parentheses")
    out.append("".join(cur))
    return out


def _parse_factor(text: str, left: int, right: int):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        inner = text[1:-1]
        return [parse_term(p, left, right) for p in _split_top(inner, "+")]
    if not text:
        raise ValueError("empty factor")
    return [parse_term(text, left, right)]


def parse_elem(text: str, left: tuple, right: tuple, policy: Policy) -> Elem:
    """Parse ``a | b + c | d``; ``|`` binds tighter than ``+``.

    A factor may be a parenthesised sum, e.g. ``(s + T^2*t) | 1``.
    """
    arity = len(left)
    text = text.strip()
    if text == "0":
        return Elem.zero(arity, policy)
    terms = []
    for summand in _split_top(text, "+"):
        facs = _split_top(summand, "|")
        if len(facs) != arity:
            raise ValueError(f"{summand.strip()!r} has {len(facs)} factors, expected {arity}")
        choices = [_parse_factor(f, l, r) for f, l, r in zip(facs, left, right)]
        stack = [()]
        for ch in choices:
            stack = [s + (c,) for s in stack for c in ch]
        terms.extend(stack)
    return Elem(arity, terms, policy)
