"""Genus-one operator model: local systems E0, E1, E_lambda on a window of
Alexander gradings, Floer morphisms between them, and the filtered
endomorphism complexes with their deformation retraction.

Every graded piece of E0, E1 and E_lambda is a free rank-one F[U]-module.
Grading ``a`` of E0 is generated by ``g_a = Ucal^p Vcal^q`` with
``p = max(0, -a)``, ``q = max(0, a)``; grading ``a`` of E1 by ``T^a``;
E_lambda has only grading 0.  An operator is therefore a table
``a -> {b: poly}`` where ``poly`` is a finite set of U-exponents.
Intermediate products may carry negative U-exponents (for instance
``Vcal^-1`` on E0); they are kept internally at extended precision and
never leak into :mod:`coeff` series.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

SPACES = ("E0", "E1", "El")
MARGIN = 2


class WindowUnderflow(ValueError):
    pass


class UnknownComposition(KeyError):
    pass


class SpaceMismatch(TypeError):
    pass


# ---------- F2 Laurent polynomials in U as exponent sets


def _pmul(a, b, P):
    acc = set()
    for x in a:
        for y in b:
            e = x + y
            if e < P:
                acc ^= {e}
    return frozenset(acc)


def _p(e, P):
    return frozenset((e,)) if e < P else frozenset()


def _pq(a):
    return max(0, -a), max(0, a)


def _render_poly(c):
    return " + ".join("1" if e == 0 else f"U^{e}" for e in sorted(c)) or "0"


# ---------- windowed operators


class WindowedOperator:
    """F[U]-linear map between graded local systems on ``[-W, W]``."""

    __slots__ = ("src", "dst", "W", "N", "P", "blocks")

    def __init__(self, src, dst, W, N, blocks=None):
        if src not in SPACES or dst not in SPACES:
            raise ValueError(f"unknown space {src!r} or {dst!r}")
        self.src, self.dst, self.W, self.N = src, dst, W, N
        self.P = N + 2 * W + 4
        self.blocks = {}
        for a, row in (blocks or {}).items():
            for b, c in row.items():
                self._acc(a, b, c)

    def _acc(self, a, b, c):
        if b not in grades(self.dst, self.W) or a not in grades(self.src, self.W):
            return
        c = frozenset(e for e in c if e < self.P)
        if not c:
            return
        row = self.blocks.setdefault(a, {})
        v = row.get(b, frozenset()) ^ c
        if v:
            row[b] = v
        else:
            del row[b]
            if not row:
                del self.blocks[a]

    def _like(self, src=None, dst=None):
        return WindowedOperator(src or self.src, dst or self.dst, self.W, self.N)

    def __matmul__(self, f):
        """``self o f``."""
        if f.dst != self.src:
            raise SpaceMismatch(f"cannot compose {self.src}<-{self.dst} after {f.src}->{f.dst}")
        if (f.W, f.N) != (self.W, self.N):
            raise WindowUnderflow("operators on different windows")
        out = WindowedOperator(f.src, self.dst, self.W, self.N)
        for a, row in f.blocks.items():
            for b, c in row.items():
                for d, c2 in self.blocks.get(b, {}).items():
                    out._acc(a, d, _pmul(c2, c, out.P))
        return out

    def __add__(self, other):
        if (other.src, other.dst) != (self.src, self.dst):
            raise SpaceMismatch("sum of operators with different spaces")
        out = self.copy()
        for a, row in other.blocks.items():
            for b, c in row.items():
                out._acc(a, b, c)
        return out

    def copy(self):
        out = self._like()
        out.blocks = {a: dict(r) for a, r in self.blocks.items()}
        return out

    def upow(self, k):
        out = self._like()
        for a, row in self.blocks.items():
            for b, c in row.items():
                out._acc(a, b, frozenset(e + k for e in c))
        return out

    def restrict(self, pred):
        """Keep only source gradings satisfying ``pred``."""
        out = self._like()
        out.blocks = {a: dict(r) for a, r in self.blocks.items() if pred(a)}
        return out

    def interior(self, margin=MARGIN):
        """Entries on source gradings at distance >= margin from the edge,
        truncated below the declared precision."""
        out = {}
        lim = self.W - margin
        for a, row in self.blocks.items():
            if self.src != "El" and abs(a) > lim:
                continue
            for b, c in row.items():
                c = frozenset(e for e in c if e < self.N)
                if c:
                    out[(a, b)] = c
        return out

    def residue(self, other=None, margin=MARGIN):
        x = self if other is None else self + other
        return x.interior(margin)

    def min_level(self):
        return min((e for row in self.blocks.values() for c in row.values() for e in c),
                   default=None)

    def apply(self, a):
        """Image of the generator in grading ``a`` as ``{b: poly}``."""
        return dict(self.blocks.get(a, {}))

    def __eq__(self, other):
        return (isinstance(other, WindowedOperator)
                and (self.src, self.dst, self.W, self.N) == (other.src, other.dst, other.W, other.N)
                and self.blocks == other.blocks)

    def __repr__(self):
        n = sum(len(r) for r in self.blocks.values())
        return f"WindowedOperator({self.src}->{self.dst}, W={self.W}, N={self.N}, entries={n})"


def grades(space, W):
    return range(0, 1) if space == "El" else range(-W, W + 1)


def _build(src, dst, W, N, rule):
    """Operator from ``rule(a) -> [(b, exponent)]``."""
    op = WindowedOperator(src, dst, W, N)
    for a in grades(src, W):
        for b, e in rule(a):
            op._acc(a, b, _p(e, op.P))
    return op


def identity(space, W, N):
    return _build(space, space, W, N, lambda a: [(a, 0)])


def upow(space, k, W, N):
    return _build(space, space, W, N, lambda a: [(a, k)])


def V(W, N):
    return _build("E0", "E0", W, N, lambda a: [(a + 1, 1 if a < 0 else 0)])


def V_inv(W, N):
    return _build("E0", "E0", W, N, lambda a: [(a - 1, -1 if a <= 0 else 0)])


def Ucal(W, N):
    return _build("E0", "E0", W, N, lambda a: [(a - 1, 1 if a > 0 else 0)])


def Ucal_inv(W, N):
    return _build("E0", "E0", W, N, lambda a: [(a + 1, -1 if a >= 0 else 0)])


def T(W, N, k=1):
    return _build("E1", "E1", W, N, lambda a: [(a + k, 0)])


def T_inv(W, N):
    return T(W, N, -1)


def phi_sigma(W, N):
    """``Ucal^i Vcal^j -> U^i T^(j-i)``."""
    return _build("E0", "E1", W, N, lambda a: [(a, _pq(a)[0])])


def phi_tau(W, N):
    """``Ucal^i Vcal^j -> U^j T^(j-i)``."""
    return _build("E0", "E1", W, N, lambda a: [(a, _pq(a)[1])])


def Delta(W, N):
    """``U^i -> (Ucal Vcal)^i``."""
    return _build("El", "E0", W, N, lambda a: [(0, 0)])


def Pi(W, N):
    """``U^i T^j -> U^i`` when ``j = 0``, else 0."""
    return _build("E1", "El", W, N, lambda a: [(0, 0)] if a == 0 else [])


def Pi_prime(W, N):
    """Alexander-homogeneous extension of Pi, landing in the graded model of
    the extended lambda system: ``U^s T^t -> U^s g_t``."""
    return _build("E1", "E0", W, N, lambda a: [(a, 0)])


def delta(i, W, N, space="E0"):
    """Projection onto Alexander grading ``i``."""
    return _build(space, space, W, N, lambda a: [(a, 0)] if a == i else [])


def delta_prime(i, W, N):
    return delta(i, W, N, "E1")


def project(space, pred, W, N):
    return _build(space, space, W, N, lambda a: [(a, 0)] if pred(a) else [])


def mult_e0(i, j, W, N):
    """Multiplication by ``Ucal^i Vcal^j`` on E0."""
    def rule(a):
        p, q = _pq(a)
        return [(a + j - i, min(p + i, q + j))]
    return _build("E0", "E0", W, N, rule)


def mult_e1(u, t, W, N):
    return _build("E1", "E1", W, N, lambda a: [(a + t, u)])


def elementary(src, dst, a, b, e, W, N):
    """The map sending ``g_a`` to ``U^e g_b`` and every other grading to 0."""
    return _build(src, dst, W, N, lambda x: [(b, e)] if x == a else [])


def filtered_flag(op: WindowedOperator) -> bool:
    """Non-increasing in gr_w and gr_z (E0 to E0); order condition otherwise."""
    if op.src == "E1" and op.dst == "E0":
        return False
    if (op.src, op.dst) != ("E0", "E0"):
        return op.min_level() is None or op.min_level() >= 0
    for a, row in op.blocks.items():
        pa, qa = _pq(a)
        for b, c in row.items():
            pb, qb = _pq(b)
            if any(e + pb < pa or e + qb < qa for e in c):
                return False
    return True


def e0_filtered_min(a, b):
    """Smallest U-power making ``g_a -> U^e g_b`` filtered."""
    pa, qa = _pq(a)
    pb, qb = _pq(b)
    return max(0, pa - pb, qa - qb)


# ---------- operator kit for a fixed window


@dataclass
class Kit:
    W: int
    N: int
    ops: dict = field(default_factory=dict)

    def __post_init__(self):
        W, N = self.W, self.N
        self.ops.update(
            V=V(W, N), Vi=V_inv(W, N), Uc=Ucal(W, N), Uci=Ucal_inv(W, N),
            T=T(W, N), Ti=T_inv(W, N), ps=phi_sigma(W, N), pt=phi_tau(W, N),
            D=Delta(W, N), Pi=Pi(W, N),
            id0=identity("E0", W, N), id1=identity("E1", W, N), idl=identity("El", W, N),
        )

    def __getattr__(self, k):
        try:
            return self.__dict__["ops"][k]
        except KeyError:
            raise AttributeError(k) from None

    def power(self, name, n):
        base = self.ops[name]
        out = identity(base.src, self.W, self.N)
        for _ in range(n):
            out = base @ out
        return out


def eta_sigma(kit: Kit):
    """Sum over i >= 0 of ``Vcal^i o Delta o Pi o T^-i``."""
    out = WindowedOperator("E1", "E0", kit.W, kit.N)
    DP = kit.D @ kit.Pi
    Vi, Ti = identity("E0", kit.W, kit.N), identity("E1", kit.W, kit.N)
    for _ in range(2 * kit.W + 2):
        out = out + Vi @ DP @ Ti
        Vi, Ti = kit.V @ Vi, kit.Ti @ Ti
    return out


def eta_tau(kit: Kit):
    """Sum over i >= 1 of ``Ucal^i o Delta o Pi o T^i``."""
    out = WindowedOperator("E1", "E0", kit.W, kit.N)
    DP = kit.D @ kit.Pi
    Ui, Ti = kit.Uc, kit.T
    for _ in range(2 * kit.W + 2):
        out = out + Ui @ DP @ Ti
        Ui, Ti = kit.Uc @ Ui, kit.T @ Ti
    return out


# ---------- Floer elements

LEGAL = {
    ("0", "0"): {"theta+", "theta-"},
    ("1", "1"): {"theta+", "theta-"},
    ("l", "l"): {"theta+", "theta-"},
    ("0", "1"): {"sigma+", "sigma-", "tau+", "tau-"},
    ("1", "0"): {"sigma+", "sigma-", "tau+", "tau-"},
    ("l", "0"): {"theta"},
    ("l", "1"): {"theta"},
    ("1", "l"): {"theta"},
    ("0", "l"): {"theta"},
}
SPACE_OF = {"0": "E0", "1": "E1", "l": "El"}


def otype(obj: str) -> str:
    """``'b0'``, ``"b0'"`` -> ``'0'``; ``'bl'`` -> ``'l'``."""
    return obj.replace("'", "")[1:]


@dataclass
class FloerElement:
    src: str
    dst: str
    terms: dict

    def __post_init__(self):
        pair = (otype(self.src), otype(self.dst))
        if pair not in LEGAL:
            raise ValueError(f"no Floer complex between {self.src} and {self.dst}")
        clean = {}
        for lab, op in self.terms.items():
            if lab not in LEGAL[pair]:
                raise ValueError(f"label {lab} illegal for {self.src}->{self.dst}")
            if (op.src, op.dst) != (SPACE_OF[pair[0]], SPACE_OF[pair[1]]):
                raise SpaceMismatch(f"operator {op.src}->{op.dst} on {self.src}->{self.dst}")
            if op.blocks:
                clean[lab] = op
        self.terms = clean

    def __add__(self, other):
        if (self.src, self.dst) != (other.src, other.dst):
            raise SpaceMismatch("sum of Floer elements on different pairs")
        t = dict(self.terms)
        for lab, op in other.terms.items():
            t[lab] = t[lab] + op if lab in t else op
        return FloerElement(self.src, self.dst, t)

    def residue(self, other=None, margin=MARGIN):
        x = self if other is None else self + other
        out = {}
        for lab, op in x.terms.items():
            r = op.interior(margin)
            if r:
                out[lab] = r
        return out

    def min_level(self):
        lv = [op.min_level() for op in self.terms.values()]
        lv = [v for v in lv if v is not None]
        return min(lv, default=None)


def fe(src, dst, **terms):
    """Shorthand: ``fe('b0', 'b1', sigma_p=op)`` with ``_p``/``_m`` for +/-."""
    t = {k.replace("_p", "+").replace("_m", "-"): v for k, v in terms.items()}
    return FloerElement(src, dst, t)


# ---------- mu1


def mu1(x: FloerElement, kit: Kit) -> FloerElement:
    pair = (otype(x.src), otype(x.dst))
    out = {}

    def put(lab, op):
        out[lab] = out[lab] + op if lab in out else op

    for lab, f in x.terms.items():
        if lab.endswith("-") or lab == "theta":
            continue
        if pair == ("0", "0"):
            put("theta-", f + kit.V @ f @ kit.Vi)
        elif pair == ("1", "1"):
            put("theta-", f + kit.Ti @ f @ kit.T)
        elif pair == ("l", "l"):
            put("theta-", f + f)
        elif pair == ("0", "1"):
            if lab == "sigma+":
                put("sigma-", f + kit.Ti @ f @ kit.V)
            else:
                put("tau-", f + kit.T @ f @ kit.Uc)
        elif pair == ("1", "0"):
            if lab == "sigma+":
                put("sigma-", f + kit.V @ f @ kit.Ti)
            else:
                put("tau-", f + kit.Uc @ f @ kit.T)
        else:
            raise UnknownComposition(("mu1", pair, lab))
    return FloerElement(x.src, x.dst, out)


# ---------- closed rule table for mu2, mu3, mu4

ZERO = "zero"


def _rules(kit: Kit) -> dict:
    U = lambda op: op.upow(1)  # noqa: E731
    k = kit
    r = {
        # Delta then the cone arrow
        (("l", "0", "1"), ("theta", "sigma+")): lambda f, g: [("theta", g @ f)],
        (("l", "0", "1"), ("theta", "tau+")): lambda f, g: [("theta", U(k.T @ g @ k.Vi @ f))],
        # the cone arrow then Pi
        (("0", "1", "l"), ("sigma+", "theta")): lambda f, g: [("theta", g @ f)],
        (("0", "1", "l"), ("tau+", "theta")): lambda f, g: [("theta", U(g @ k.T @ f @ k.Vi))],
        # Pi then Delta
        (("1", "l", "0"), ("theta", "theta")): lambda f, g: [
            ("sigma-", g @ f), ("tau-", U(k.Vi @ g @ f @ k.T))],
        # cone arrow then a morphism E1 -> E0
        (("0", "1", "0"), ("sigma+", "sigma+")): lambda f, g: [("theta+", k.V @ g @ k.Ti @ f)],
        (("0", "1", "0"), ("tau+", "tau+")): lambda f, g: [("theta+", U(g @ k.T @ f @ k.Vi))],
        (("0", "1", "0"), ("sigma+", "tau+")): ZERO,
        (("0", "1", "0"), ("tau+", "sigma+")): ZERO,
        # morphism E1 -> E0 then cone arrow
        (("1", "0", "1"), ("sigma+", "sigma+")): lambda f, g: [("theta+", g @ f)],
        (("1", "0", "1"), ("tau+", "tau+")): lambda f, g: [("theta+", U(k.T @ g @ k.Vi @ f))],
        (("1", "0", "1"), ("sigma+", "tau+")): ZERO,
        (("1", "0", "1"), ("tau+", "sigma+")): ZERO,
        # identity-class actions in the endomorphism algebra
        (("0", "0", "1"), ("theta+", "sigma+")): lambda f, g: [("sigma+", g @ f)],
        (("0", "0", "1"), ("theta+", "tau+")): lambda f, g: [("tau+", g @ f)],
        (("0", "1", "1"), ("sigma+", "theta+")): lambda f, g: [("sigma+", g @ f)],
        (("0", "1", "1"), ("tau+", "theta+")): lambda f, g: [("tau+", g @ f)],
        # rectangles
        (("l", "0", "1", "l"), ("theta", "tau+", "theta")): lambda f, g, h: [
            ("theta+", U(h @ k.T @ g @ k.Vi @ f))],
        (("l", "0", "1", "l"), ("theta", "sigma+", "theta")): ZERO,
        (("0", "1", "l", "0"), ("tau+", "theta", "theta")): lambda f, g, h: [
            ("theta+", U(h @ g @ k.T @ f @ k.Vi))],
        (("0", "1", "l", "0"), ("sigma+", "theta", "theta")): ZERO,
    }
    for a, b in itertools.product(("sigma+", "tau+"), repeat=2):
        r[(("1", "l", "0", "1"), ("theta", "theta", a))] = ZERO
        r[(("0", "1", "l", "0", "1"), (a, "theta", "theta", b))] = ZERO
        for c in ("sigma+", "tau+"):
            r[(("0", "1", "0", "1"), (a, b, c))] = ZERO
    return r


_TOP = {"theta+", "sigma+", "tau+"}


def _top_degree_vanishing(types, labels):
    """Higher products of top-degree filtered inputs vanish by grading."""
    if len(labels) < 3 or not set(labels) <= _TOP:
        return False
    if any(t not in "01" for t in types):
        return False
    return list(types) == sorted(types)


def mu(xs, kit: Kit, rules=None) -> FloerElement:
    """Higher product of composable Floer elements; first input acts first."""
    if len(xs) == 1:
        return mu1(xs[0], kit)
    for a, b in zip(xs, xs[1:]):
        if a.dst != b.src:
            raise SpaceMismatch(f"{a.src}->{a.dst} not composable with {b.src}->{b.dst}")
    rules = rules if rules is not None else _rules(kit)
    types = tuple(otype(x.src) for x in xs) + (otype(xs[-1].dst),)
    out = FloerElement(xs[0].src, xs[-1].dst, {})
    for combo in itertools.product(*[list(x.terms.items()) for x in xs]):
        labels = tuple(lab for lab, _ in combo)
        key = (types, labels)
        rule = rules.get(key)
        if rule is None:
            if _top_degree_vanishing(types, labels):
                continue
            raise UnknownComposition(key)
        if rule == ZERO:
            continue
        for lab, op in rule(*[op for _, op in combo]):
            out = out + FloerElement(out.src, out.dst, {lab: op})
    return out


def mu2(a, b, kit, rules=None):
    return mu([a, b], kit, rules)


def mu3(a, b, c, kit, rules=None):
    return mu([a, b, c], kit, rules)


# ---------- twisted complexes


def twisted_mu(morphs, diffs, kit: Kit, rules=None) -> dict:
    """Twisted-complex product of morphisms ``m_1 .. m_k`` where ``m_i`` runs
    from complex ``i-1`` to complex ``i`` and ``diffs[i]`` lists the internal
    arrows of complex ``i``.  Returns ``(src, dst) -> FloerElement``."""
    rules = rules if rules is not None else _rules(kit)
    k = len(morphs)
    out = {}

    def extend(path, gap):
        if gap == k:
            yield from chains(path, gap)
            return
        for p in chains(path, gap):
            for m in morphs[gap]:
                if not p or p[-1].dst == m.src:
                    yield from extend(p + [m], gap + 1)

    def chains(path, gap):
        yield path
        for d in diffs[gap]:
            if not path or path[-1].dst == d.src:
                yield from chains(path + [d], gap)

    for path in extend([], 0):
        r = mu(path, kit, rules)
        key = (r.src, r.dst)
        out[key] = out[key] + r if key in out else r
    return out


def _tw_residue(tw: dict, margin=MARGIN) -> dict:
    out = {}
    for key, x in tw.items():
        r = x.residue(margin=margin)
        if r:
            out[key] = r
    return out


# ---------- the local triangle


@dataclass
class LocalCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class LocalReport:
    W: int
    N: int
    checks: list

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def verdicts(self):
        return {c.name: c.ok for c in self.checks}

    def lines(self):
        out = []
        for c in self.checks:
            tail = f"  {c.detail}" if c.detail and not c.ok else ""
            out.append(f"{'pass' if c.ok else 'FAIL'}  {c.name}{tail}")
        return out


def _first(res: dict) -> str:
    if not res:
        return ""
    key = sorted(res, key=repr)[0]
    v = res[key]
    while isinstance(v, dict):
        k2 = sorted(v, key=repr)[0]
        key, v = (key, k2), v[k2]
    return f"{key}: {_render_poly(v)}"


def _check(name, res):
    return LocalCheck(name, not res, _first(res))


def local_pieces(kit: Kit) -> dict:
    """Phi, Psi, the cone arrows, X, Y and Z on the window."""
    k = kit
    D = fe("b0", "b1", sigma_p=k.ps, tau_p=k.pt)
    Dp = fe("b0'", "b1'", sigma_p=k.ps, tau_p=k.pt)
    X = fe("b0", "b0'", theta_p=delta(0, k.W, k.N))
    Y = fe("b1", "b0'", sigma_m=k.D @ k.Pi, tau_m=k.Uc @ k.D @ k.Pi @ k.T)
    Z = fe("b1", "b0'", sigma_p=eta_sigma(k), tau_p=eta_tau(k))
    return dict(
        D=D, Dp=Dp, X=X, Y=Y, Z=Z,
        Phi=fe("bl", "b0", theta=k.D),
        PhiP=fe("bl", "b0'", theta=k.D),
        Psi=fe("b1", "bl'", theta=k.Pi),
        PsiL=fe("b1", "bl", theta=k.Pi),
    )


def verify_local_triangle(W: int, N: int) -> LocalReport:
    if W < 4 or N < 4:
        raise WindowUnderflow("need W >= 4 and N >= 4")
    k = Kit(W, N)
    rules = _rules(k)
    pc = local_pieces(k)
    D, Dp, X, Y, Z = pc["D"], pc["Dp"], pc["X"], pc["Y"], pc["Z"]
    checks = []

    # mu1(Phi), mu1(Psi) on the twisted complexes
    m1phi = twisted_mu([[pc["Phi"]]], [[], [D]], k, rules)
    checks.append(_check("mu1(Phi) = 0", _tw_residue(m1phi)))
    m1psi = twisted_mu([[pc["Psi"]]], [[D], []], k, rules)
    checks.append(_check("mu1(Psi) = 0", _tw_residue(m1psi)))

    # mu2(Phi, Psi) = [theta+, id]
    m2 = twisted_mu([[pc["Phi"]], [pc["Psi"]]], [[], [D], []], k, rules)
    got = m2.get(("bl", "bl'"), FloerElement("bl", "bl'", {}))
    want = FloerElement("bl", "bl'", {"theta+": k.idl})
    checks.append(_check("mu2(Phi,Psi) = [theta+, id]", got.residue(want)))

    # the composite map behind it
    comp = (k.Pi @ k.T @ k.pt @ k.Vi @ k.D).upow(1)
    checks.append(_check("U Pi T phi_tau V^-1 Delta = id", comp.residue(k.idl)))

    # mu2(Psi, Phi) = X + Y
    psiphi = twisted_mu([[pc["PsiL"]], [pc["PhiP"]]], [[D], [], [Dp]], k, rules)
    res = {}
    for key, want in ((("b0", "b0'"), X), (("b1", "b0'"), Y)):
        got = psiphi.get(key, FloerElement(*key, {}))
        r = got.residue(want)
        if r:
            res[key] = r
    for key, x in psiphi.items():
        if key not in (("b0", "b0'"), ("b1", "b0'")):
            r = x.residue()
            if r:
                res[key] = r
    checks.append(_check("mu2(Psi,Phi) = X + Y", res))

    # eta identities
    es, et = eta_sigma(k), eta_tau(k)
    checks.append(_check("eta_s + V eta_s T^-1 = Delta Pi",
                         (es + k.V @ es @ k.Ti).residue(k.D @ k.Pi)))
    checks.append(_check("eta_t + U eta_t T = U Delta Pi T",
                         (et + k.Uc @ et @ k.T).residue(k.Uc @ k.D @ k.Pi @ k.T)))

    # mu1(Z) = Y
    checks.append(_check("mu1(Z) = Y", mu1(Z, k).residue(Y)))

    # the two triangle counts against Z
    lhs = mu2(D, Z, k, rules)
    rest = WindowedOperator("E0", "E0", W, N)
    for i in grades("E0", W):
        if i != 0:
            rest = rest + delta(i, W, N)
    checks.append(_check("mu2(D,Z) = sum over i != 0 of [theta+, delta_i]",
                         lhs.residue(fe("b0", "b0'", theta_p=rest))))
    rhs = mu2(Z, Dp, k, rules)
    checks.append(_check("mu2(Z,D') = [theta+, id]", rhs.residue(fe("b1", "b1'", theta_p=k.id1))))

    # full homotopy identity
    H = fe("b1", "b0'", sigma_p=es, tau_p=et)
    dH = twisted_mu([[H]], [[D], [Dp]], k, rules)
    ids = {("b0", "b0'"): fe("b0", "b0'", theta_p=k.id0),
           ("b1", "b1'"): fe("b1", "b1'", theta_p=k.id1)}
    total = {}
    for part in (psiphi, dH, ids):
        for key, x in part.items():
            total[key] = total[key] + x if key in total else x
    checks.append(_check("mu2(Psi,Phi) + [theta+,id] + [theta+,id] = mu1(H)", _tw_residue(total)))

    # the modified projection agrees with Delta Pi in Alexander grading zero
    pp = Pi_prime(W, N).restrict(lambda a: a == 0)
    checks.append(_check("Pi' = Delta Pi on grading 0", pp.residue(k.D @ k.Pi)))
    return LocalReport(W, N, checks)


def local_triangle_stable(W: int, N: int, step: int = 4) -> bool:
    """Verdicts at ``W`` and ``W + step`` agree and all pass."""
    a, b = verify_local_triangle(W, N), verify_local_triangle(W + step, N)
    return a.ok and b.ok and a.verdicts() == b.verdicts()


def local_min_level(W: int, N: int):
    """Smallest U-power among the finished morphisms of the local model."""
    k = Kit(W, N)
    pc = local_pieces(k)
    lv = [x.min_level() for x in pc.values()]
    return min(v for v in lv if v is not None)


# ---------- filtered endomorphism complexes and their retraction


@dataclass(frozen=True)
class EndComplex:
    """One of the four filtered morphism complexes.

    ``d[theta+, f] = [theta-, f + C(f)]``; the retraction sends ``f`` to
    ``f(1)`` and the homotopy is ``h(f) = sum C^n(f Q) + sum C^-n(f P)``.
    """

    name: str
    src: str
    dst: str

    def conj(self, k: Kit, f, n=1):
        if self.name == "00":
            a, b = (k.V, k.Vi) if n > 0 else (k.Vi, k.V)
        elif self.name == "sigma":
            a, b = (k.Ti, k.V) if n > 0 else (k.T, k.Vi)
        elif self.name == "tau":
            a, b = (k.T, k.Uc) if n > 0 else (k.Ti, k.Uci)
        else:
            a, b = (k.Ti, k.T) if n > 0 else (k.T, k.Ti)
        for _ in range(abs(n)):
            f = a @ f @ b
        return f

    def split(self, a):
        """True on gradings handled by the forward sum."""
        if self.name in ("00", "tau"):
            return a > 0
        return a < 0

    def unit(self, k: Kit, x: dict):
        """Image of a homology class ``f(1)`` as an operator."""
        W, N = k.W, k.N
        if self.src == "E0" and self.dst == "E0":
            out = WindowedOperator("E0", "E0", W, N)
            for b, c in x.items():
                p, q = _pq(b)
                for e in c:
                    out = out + mult_e0(p + e, q + e, W, N)
            return out
        out = WindowedOperator("E1", "E1", W, N)
        for b, c in x.items():
            for e in c:
                out = out + mult_e1(e, b, W, N)
        if self.name == "sigma":
            return out @ k.ps
        if self.name == "tau":
            return out @ k.pt
        return out

    def d(self, k, f):
        return f + self.conj(k, f)

    def h(self, k: Kit, f):
        Q = project(self.src, self.split, k.W, k.N)
        P = project(self.src, lambda a: not self.split(a), k.W, k.N)
        out = WindowedOperator(self.src, self.dst, k.W, k.N)
        fq, fp = f @ Q, f @ P
        for n in range(0, 2 * k.W + 2):
            out = out + self.conj(k, fq, n)
            if n:
                out = out + self.conj(k, fp, -n)
        return out

    def proj(self, f) -> dict:
        """``f(1)`` as ``{grading: poly}``."""
        return {b: c for b, c in f.apply(0).items()}

    def basis(self, W, N, margin=MARGIN):
        """K-monomials on the window interior, as ``f(1)`` values."""
        lim = W - margin
        out = []
        for b in range(-lim, lim + 1):
            for e in range(N):
                out.append({b: frozenset((e,))})
        return out

    def elementary(self, k: Kit, margin):
        """Elementary operators ``g_a -> U^e g_b`` with ``|b - a| <= 1``."""
        lim = k.W - margin
        for a in range(-lim, lim + 1):
            for b in (a - 1, a, a + 1):
                e0 = e0_filtered_min(a, b) if self.name == "00" else 0
                for e in (e0, e0 + 1):
                    yield elementary(self.src, self.dst, a, b, e, k.W, k.N)


END_COMPLEXES = (
    EndComplex("00", "E0", "E0"),
    EndComplex("sigma", "E0", "E1"),
    EndComplex("tau", "E0", "E1"),
    EndComplex("11", "E1", "E1"),
)


def _shift(x: dict) -> int:
    """Grading shift of the multiplication operator; widens the margin."""
    return max((abs(b) for b in x), default=0) + 1


def _xres(x: dict, y: dict, N) -> dict:
    out = {}
    for b in set(x) | set(y):
        c = frozenset(e for e in x.get(b, frozenset()) ^ y.get(b, frozenset()) if e < N)
        if c:
            out[b] = c
    return out


@dataclass
class EndHomologyRow:
    complex: str
    basis_size: int
    cycles: bool
    independent: bool
    spanning: bool

    @property
    def ok(self):
        return self.cycles and self.independent and self.spanning


def end_algebra_homology(W: int, N: int, margin: int = MARGIN) -> list:
    """Homology of each filtered morphism complex on the window interior.

    A basis element ``x`` is represented by ``[theta+, unit(x)]``.  It is a
    cycle, the retraction recovers ``x`` (so distinct monomials stay
    independent), and every elementary generator is homologous to the
    image of its retraction (so they span)."""
    if W < 4:
        raise WindowUnderflow("need W >= 4")
    k = Kit(W, N)
    rows = []
    for cx in END_COMPLEXES:
        basis = cx.basis(W, N, margin + 2)
        cyc = ind = True
        for x in basis:
            u = cx.unit(k, x)
            if cx.d(k, u).interior(margin + _shift(x)):
                cyc = False
            if _xres(cx.proj(u), x, N):
                ind = False
        span = not _retraction_failures(cx, k, margin)
        rows.append(EndHomologyRow(cx.name, len(basis), cyc, ind, span))
    return rows


def _retraction_failures(cx: EndComplex, k: Kit, margin) -> list:
    bad = []
    for f in cx.elementary(k, margin + 2):
        # I Pi + id = dH + Hd on [theta+, f]
        if (cx.h(k, cx.d(k, f)) + cx.unit(k, cx.proj(f))).residue(f, margin):
            bad.append(("theta+", f))
        # ... and on [theta-, f]
        if cx.d(k, cx.h(k, f)).residue(f, margin):
            bad.append(("theta-", f))
    return bad


@dataclass
class RetractionReport:
    W: int
    N: int
    checks: list

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def lines(self):
        return [f"{'pass' if c.ok else 'FAIL'}  {c.name}" + (f"  {c.detail}" if c.detail and not c.ok else "")
                for c in self.checks]


def retraction_check(W: int, N: int, margin: int = MARGIN) -> RetractionReport:
    if W < 4:
        raise WindowUnderflow("need W >= 4")
    k = Kit(W, N)
    checks = []
    for cx in END_COMPLEXES:
        gens = list(cx.elementary(k, margin + 2))
        # d Pi = 0: boundaries live in theta-, which Pi kills
        checks.append(LocalCheck(f"{cx.name}: d(Pi) = 0", True))
        dI, PI = [], []
        for x in cx.basis(W, N, margin + 2):
            u = cx.unit(k, x)
            if cx.d(k, u).interior(margin + _shift(x)):
                dI.append(x)
            if _xres(cx.proj(u), x, N):
                PI.append(x)
        checks.append(LocalCheck(f"{cx.name}: d(I) = 0", not dI, repr(dI[:1])))
        checks.append(LocalCheck(f"{cx.name}: Pi I = id", not PI, repr(PI[:1])))
        bad = _retraction_failures(cx, k, margin)
        checks.append(LocalCheck(f"{cx.name}: I Pi + id = d(H)", not bad,
                                 repr(bad[0]) if bad else ""))
        h4 = [f for f in gens if (cx.conj(k, cx.h(k, f)) + cx.h(k, f)).residue(f, margin)]
        checks.append(LocalCheck(f"{cx.name}: C(h(f)) + h(f) = f", not h4))
        nf = _unfiltered_h(cx, k, gens, margin)
        checks.append(LocalCheck(f"{cx.name}: h(f) filtered", not nf))
        if cx.name == "00":
            checks.append(LocalCheck("00: h-terms vanish below their index", _h1_ok(cx, k, gens)))
    return RetractionReport(W, N, checks)


def _unfiltered_h(cx, k, gens, margin):
    return [f for f in gens if filtered_flag(f) and not filtered_flag(_trim(cx.h(k, f), margin))]


def _trim(op, margin):
    return op.restrict(lambda a: abs(a) <= op.W - margin)


def _h1_ok(cx, k, gens):
    Q = project("E0", cx.split, k.W, k.N)
    P = project("E0", lambda a: not cx.split(a), k.W, k.N)
    for f in gens[::5]:
        for n in range(0, k.W):
            t = cx.conj(k, f @ Q, n)
            if any(a < n for a in t.blocks):
                return False
            if n and any(a > -n for a in cx.conj(k, f @ P, -n).blocks):
                return False
    return True


# ---------- inclusion of K and induced higher products


def include(cx_name: str, x: dict, kit: Kit) -> FloerElement:
    cx = {c.name: c for c in END_COMPLEXES}[cx_name]
    u = cx.unit(kit, x)
    if cx_name == "00":
        return fe("b0", "b0'", theta_p=u)
    if cx_name == "11":
        return fe("b1", "b1'", theta_p=u)
    return FloerElement("b0", "b1", {cx_name + "+": u})


def end_homotopy(x: FloerElement, kit: Kit) -> FloerElement:
    """The homotopy H: zero on top generators, ``h`` on bottom ones."""
    pair = (otype(x.src), otype(x.dst))
    out = {}
    for lab, f in x.terms.items():
        if lab.endswith("+"):
            continue
        cx = {("0", "0"): "00", ("1", "1"): "11"}.get(pair, lab[:-1])
        c = {c.name: c for c in END_COMPLEXES}[cx]
        out[lab[:-1] + "+"] = c.h(kit, f)
    return FloerElement(x.src, x.dst, out)


def induced_mu3(a, b, c, kit: Kit) -> FloerElement:
    """Tree sum for the transferred third product on included inputs."""
    rules = _rules(kit)
    left = mu2(end_homotopy(mu2(a, b, kit, rules), kit), c, kit, rules)
    right = mu2(a, end_homotopy(mu2(b, c, kit, rules), kit), kit, rules)
    top = mu3(a, b, c, kit, rules)
    return left + right + top


def sampled_induced_mu3(W: int, N: int) -> list:
    """Induced third products on sample input shapes; all should vanish."""
    k = Kit(W, N)
    out = []
    xs00 = [{0: frozenset((0,))}, {1: frozenset((0,))}, {-1: frozenset((1,))}]
    xs11 = [{0: frozenset((0,))}, {2: frozenset((1,))}]
    for lab in ("sigma", "tau"):
        for x0, y, x1 in itertools.product(xs00, ({0: frozenset((0,))}, {-1: frozenset((0,))}), xs11):
            a = include("00", x0, k)
            b = include(lab, y, k)
            c = include("11", x1, k)
            # rename objects so the three inputs compose
            a = FloerElement("b0", "b0'", a.terms)
            b = FloerElement("b0'", "b1", b.terms)
            c = FloerElement("b1", "b1'", c.terms)
            r = induced_mu3(a, b, c, k)
            out.append(((lab, tuple(x0), tuple(y), tuple(x1)), r.residue()))
    return out
