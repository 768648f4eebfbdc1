"""Plain-text interchange format for type-D modules and knot presentations.

See ``docs/format.md`` for the grammar.  Example::

    format: 1
    arity: 1
    policy: uadic N=16
    framing: 3
    generators:
      x0 (0) gr=0 alex=0
      x1 (1)
    delta1:
      x0 -> x1 : s + T^3*t
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import parse_elem, render
from .coeff import Policy
from .modules import Generator, TypeDModule, ValidationFailed, validate

FORMAT_VERSION = 1
HEADERS = ("format", "arity", "policy", "framing", "name")
BLOCKS = ("generators", "delta1", "cfk", "result")

_NAME = r"[^\s:()]+"
_GEN = re.compile(rf"^(?P<name>{_NAME})\s+\((?P<idem>[^)]*)\)(?P<rest>.*)$")
_ARROW = re.compile(rf"^(?P<s>{_NAME})\s+->\s+(?P<t>{_NAME})\s*:\s*(?P<e>.*)$")
_POLICY = re.compile(r"^(?P<mode>uadic|chiral)((\s+W=(?P<W>\d+))?\s+N=(?P<N>\d+))$")


class ParseError(ValueError):
    def __init__(self, msg, line, col=1):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


@dataclass
class ModuleFile:
    module: TypeDModule
    version: int = FORMAT_VERSION
    result: dict = field(default_factory=dict)

    @property
    def is_knot(self) -> bool:
        return self.module.framing is not None


def _ints(text, line, col, what):
    try:
        return tuple(int(x) for x in text.split(",")) if text.strip() else ()
    except ValueError:
        raise ParseError(f"bad {what} {text!r}", line, col) from None


def _parse_policy(text, line, col):
    m = _POLICY.match(text.strip())
    if not m:
        raise ParseError(f"bad policy {text.strip()!r}", line, col)
    if m["mode"] == "chiral" and m["W"] is None:
        raise ParseError("chiral policy needs W=", line, col)
    if m["mode"] == "uadic" and m["W"] is not None:
        raise ParseError("uadic policy takes no W=", line, col)
    W = int(m["W"]) if m["W"] is not None else None
    return Policy(m["mode"], int(m["N"]), W)


def parse(text: str, check: bool = True) -> ModuleFile:
    """Parse a module or knot file.  With ``check`` the structure relation is
    verified and a violation raises :class:`ValidationFailed`."""
    head, gens, arrows, cfk, result = {}, [], [], {}, {}
    block = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        col = indent + 1
        if indent == 0:
            key, sep, val = body.partition(":")
            if not sep:
                raise ParseError(f"expected 'key:' got {body!r}", ln, col)
            key = key.strip()
            if key in BLOCKS:
                if val.strip():
                    raise ParseError(f"block {key!r} takes no inline value", ln, col + len(key) + 1)
                if key in head.get("_blocks", ()):
                    raise ParseError(f"duplicate block {key!r}", ln, col)
                head.setdefault("_blocks", []).append(key)
                block = key
                continue
            if key not in HEADERS:
                raise ParseError(f"unknown field {key!r}", ln, col)
            if key in head:
                raise ParseError(f"duplicate field {key!r}", ln, col)
            head[key] = (val.strip(), ln, col + len(key) + 2)
            block = None
            continue
        if block is None:
            raise ParseError("indented line outside a block", ln, col)
        if block == "generators":
            gens.append((body, ln, col))
        elif block == "delta1":
            arrows.append((body, ln, col))
        elif block == "cfk":
            parts = body.split()
            if len(parts) != 2:
                raise ParseError("cfk line must be 'name alexander'", ln, col)
            cfk[parts[0]] = (_ints(parts[1], ln, col + len(parts[0]) + 1, "Alexander grading"), ln, col)
        else:
            key, sep, val = body.partition(":")
            if not sep:
                raise ParseError("result line must be 'key: value'", ln, col)
            result[key.strip()] = val.strip()

    for req in ("format", "arity", "policy"):
        if req not in head:
            raise ParseError(f"missing field {req!r}", 1, 1)
    fv, ln, col = head["format"]
    if fv != str(FORMAT_VERSION):
        raise ParseError(f"unsupported format version {fv!r}", ln, col)
    av, ln, col = head["arity"]
    if not av.isdigit() or int(av) < 1:
        raise ParseError(f"bad arity {av!r}", ln, col)
    arity = int(av)
    policy = _parse_policy(*head["policy"])
    framing = None
    if "framing" in head:
        fr = _ints(*head["framing"], "framing")
        if len(fr) != arity:
            raise ParseError(f"framing needs {arity} entries", head["framing"][1], head["framing"][2])
        framing = fr[0] if arity == 1 else fr
    name = head["name"][0] if "name" in head else None

    glist = []
    for body, ln, col in gens:
        m = _GEN.match(body)
        if not m:
            raise ParseError(f"bad generator line {body!r}", ln, col)
        idem = _ints(m["idem"], ln, col + m.start("idem"), "idempotent vector")
        if len(idem) != arity or any(x not in (0, 1) for x in idem):
            raise ParseError(f"idempotent vector {m['idem']!r} must have {arity} entries in {{0,1}}",
                             ln, col + m.start("idem"))
        gr = alex = None
        for tok in m["rest"].split():
            k, sep, v = tok.partition("=")
            tcol = col + body.index(tok)
            if k == "gr" and sep:
                try:
                    gr = Fraction(v)
                except ValueError:
                    raise ParseError(f"bad grading {v!r}", ln, tcol) from None
            elif k == "alex" and sep:
                alex = _ints(v, ln, tcol, "Alexander grading")
                if len(alex) != arity:
                    raise ParseError(f"alex needs {arity} entries", ln, tcol)
            else:
                raise ParseError(f"unknown generator attribute {tok!r}", ln, tcol)
        glist.append(Generator(m["name"], idem, gr, alex))
    index = {g.name: g for g in glist}
    if len(index) != len(glist):
        raise ParseError("duplicate generator name", gens[-1][1], 1)

    amap = {}
    for body, ln, col in arrows:
        m = _ARROW.match(body)
        if not m:
            raise ParseError(f"bad arrow line {body!r}", ln, col)
        for k in ("s", "t"):
            if m[k] not in index:
                raise ParseError(f"unknown generator {m[k]!r}", ln, col + m.start(k))
        s, t = index[m["s"]], index[m["t"]]
        try:
            e = parse_elem(m["e"], t.idem, s.idem, policy)
        except (ValueError, AssertionError) as exc:
            raise ParseError(str(exc), ln, col + m.start("e")) from None
        key = (s.name, t.name)
        amap[key] = amap[key] + e if key in amap else e

    cfk_meta = None
    if cfk:
        cfk_meta = {}
        for nm, (A, ln, col) in cfk.items():
            if nm not in index or any(index[nm].idem):
                raise ParseError(f"cfk entry {nm!r} is not an idempotent-0 generator", ln, col)
            cfk_meta[nm] = A[0] if len(A) == 1 else A

    try:
        mod = TypeDModule(glist, amap, policy, arity, framing, name, cfk_meta)
    except (ValueError, KeyError, AssertionError) as exc:
        raise ParseError(str(exc), arrows[0][1] if arrows else 1, 1) from None
    if check:
        v = validate(mod)
        if v is not None:
            raise ValidationFailed(f"structure relation fails at {v.src} -> {v.dst}: {render(v.residue)}")
    return ModuleFile(mod, FORMAT_VERSION, result)


def _fmt_frac(x):
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def emit(m: TypeDModule, result: dict | None = None) -> str:
    """Canonical text: generators in module order, arrows by endpoint order."""
    out = [f"format: {FORMAT_VERSION}", f"arity: {m.arity}", f"policy: {m.policy}"]
    if m.framing is not None:
        fr = m.framing if isinstance(m.framing, tuple) else (m.framing,)
        out.append("framing: " + ",".join(str(x) for x in fr))
    if m.name:
        out.append(f"name: {m.name}")
    out.append("generators:")
    for g in m.gens:
        parts = [f"  {g.name} (" + ",".join(str(x) for x in g.idem) + ")"]
        if g.gr is not None:
            parts.append(f"gr={_fmt_frac(Fraction(g.gr))}")
        if g.alex is not None:
            parts.append("alex=" + ",".join(str(x) for x in g.alex))
        out.append(" ".join(parts))
    out.append("delta1:")
    for (s, t) in sorted(m.arrows, key=lambda k: (m.index[k[0]], m.index[k[1]])):
        out.append(f"  {s} -> {t} : {render(m.arrows[(s, t)])}")
    if m.cfk:
        out.append("cfk:")
        for nm in sorted(m.cfk, key=lambda n: m.index[n]):
            A = m.cfk[nm]
            out.append(f"  {nm} " + (",".join(str(x) for x in A) if isinstance(A, tuple) else str(A)))
    if result:
        out.append("result:")
        for k in result:
            out.append(f"  {k}: {result[k]}")
    return "\n".join(out) + "\n"


def load(path: str, check: bool = True) -> ModuleFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), check)
