"""Command-line interface.

Exit codes: 0 pass, 1 residue failure, 2 input error, 3 precision warning.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .coeff import ChiralWindow, Policy, UAdic
from .homology import HomologyReport, homology
from .interchange import ParseError, emit, load
from .modules import ValidationFailed, reduce, validate
from .zoo import PRESETS, make_dinfty, preset_knot

EXIT_OK, EXIT_RESIDUE, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3

DEFAULT_MODE, DEFAULT_N, DEFAULT_W = "uadic", 16, 8


class InputError(ValueError):
    pass


def policy_of(args) -> Policy:
    if args.mode == "chiral":
        return ChiralWindow(args.window, args.precision)
    return UAdic(args.precision)


def _knot_spec(text):
    """``name:framing`` for the glue command."""
    name, sep, fr = text.rpartition(":")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME:FRAMING, got {text!r}")
    try:
        return name, int(fr)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad framing in {text!r}") from None


def module_of(args, policy=None):
    pol = policy or policy_of(args)
    if getattr(args, "file", None):
        try:
            m = load(args.file).module
        except OSError as exc:
            raise InputError(str(exc)) from None
        return m.with_policy(pol) if policy is not None else m
    preset = getattr(args, "preset", None) or "unknot"
    fr = getattr(args, "framing", None)
    if preset == "dinfty":
        return make_dinfty(pol)
    if preset not in PRESETS:
        raise InputError(f"unknown preset {preset!r}; known: dinfty, {', '.join(PRESETS)}")
    return preset_knot(preset, 0 if fr is None else fr, pol)


def _named(preset, framing, pol):
    if preset not in PRESETS:
        raise InputError(f"unknown preset {preset!r}")
    return preset_knot(preset, framing, pol)


def homology_table(rep: HomologyReport) -> list:
    out = [f"{'spin^c':<12} {'towers':>6}  {'d-level':>8}  torsion"]
    for lab, cl in rep.classes.items():
        tors = ", ".join(f"U^{k}" for k in cl.torsion_orders) or "-"
        d = "-" if cl.d_level is None else str(cl.d_level)
        lab_s = ",".join(str(x) for x in lab) if isinstance(lab, tuple) else str(lab)
        out.append(f"{lab_s:<12} {cl.tower_count:>6}  {d:>8}  {tors}")
    out.append(rep.summary())
    if rep.warning:
        out.append("warning: a torsion order reaches the precision bound; raise --precision")
    return out


def _result_block(rep: HomologyReport) -> dict:
    return {
        "towers": str(rep.tower_count),
        "torsion": ",".join(str(k) for k in rep.torsion_orders) or "none",
        "precision": str(rep.N),
        "warning": "yes" if rep.warning else "no",
    }


def _homology_exit(rep):
    return EXIT_PRECISION if rep.warning else EXIT_OK


# ---------- commands


def cmd_validate(args, out):
    m = module_of(args)
    v = validate(m)
    if v is None:
        out(f"valid: {m.name or 'module'} ({len(m.gens)} generators, {m.policy})")
        return EXIT_OK
    out(f"invalid: {v}")
    return EXIT_RESIDUE


def cmd_box(args, out):
    from .surgery import knot_surgery, link_surgery

    m = module_of(args)
    c = knot_surgery(m, args.window, args.precision) if m.arity == 1 else link_surgery(m, args.window, args.precision)
    res = c.square_residue()
    out(f"box: {len(c.gens)} generators, {len(c.arrows)} arrows, N={c.N}, window {args.window}")
    out(f"d^2 residue: {'0' if not res else len(res)}")
    return EXIT_RESIDUE if res else EXIT_OK


def cmd_reduce(args, out):
    m = module_of(args)
    r = reduce(m)
    bad = r.verify()
    out(f"reduced {len(m.gens)} -> {len(r.reduced.gens)} generators")
    for b in bad:
        out(f"FAIL {b}")
    if args.emit:
        out(emit(r.reduced).rstrip())
    return EXIT_RESIDUE if bad else EXIT_OK


def _surgery_report(m, args, out, graded=False):
    from .surgery import (DegenerateFraming, assign_gradings, framing_matrix,
                          knot_surgery, link_surgery)

    c = knot_surgery(m, args.window, args.precision) if m.arity == 1 else link_surgery(m, args.window, args.precision)
    if c.square_residue():
        out("d^2 residue is nonzero")
        return EXIT_RESIDUE
    if graded and m.framing is not None:
        try:
            c = assign_gradings(c, framing_matrix(m.framing))
        except DegenerateFraming:
            out("degenerate framing: no Spin^c splitting")
    rep = homology(c)
    for line in homology_table(rep):
        out(line)
    if args.emit:
        out(emit(m, _result_block(rep)).rstrip())
    return _homology_exit(rep)


def cmd_homology(args, out):
    return _surgery_report(module_of(args), args, out)


def cmd_surgery(args, out):
    """Like ``homology`` but split by Spin^c with d-levels when the framing allows."""
    return _surgery_report(module_of(args), args, out, graded=True)


def cmd_glue(args, out):
    from .surgery import glue

    pol = policy_of(args)
    (ln, lf), (rn, rf) = args.left, args.right
    c = glue(_named(ln, lf, pol), _named(rn, rf, pol), args.window, args.precision)
    if c.square_residue():
        out("d^2 residue is nonzero")
        return EXIT_RESIDUE
    rep = homology(c)
    out(f"glue {ln}:{lf} with {rn}:{rf}")
    for line in homology_table(rep):
        out(line)
    return _homology_exit(rep)


def cmd_h1(args, out):
    from .surgery import h1_report, knot_surgery

    m = module_of(args)
    c = knot_surgery(m, args.window, args.precision)
    rep = h1_report(c, 0)
    out(f"chain map residue: {len(rep.chain_residue)}")
    out(f"square null-homotopic: {rep.square_null}")
    for (s, t), v in sorted(rep.tower_action.items()):
        out(f"tower action {s} -> {t}: mask {v:#x}")
    if not rep.tower_action:
        out("tower action: 0")
    return EXIT_OK if rep.ok else EXIT_RESIDUE


def cmd_gradings(args, out):
    from .surgery import (DegenerateFraming, assign_gradings, d_invariants,
                          grading_violations, knot_surgery)

    m = module_of(args)
    fr = m.framing if m.framing is not None else 0
    c = knot_surgery(m, args.window, args.precision)
    try:
        g = assign_gradings(c, [[fr]])
        bad = grading_violations(g)
    except DegenerateFraming:
        g = assign_gradings(c, [[fr]], absolute=False)
        out("degenerate framing: relative gradings only, degree check skipped")
        bad = []
    d = d_invariants(g, Fraction(args.calibration))
    out(f"{'spin^c':<10} d-level")
    for lab, v in d.d_levels.items():
        out(f"{','.join(str(x) for x in lab):<10} {v}")
    out(f"grading violations: {len(bad)}")
    if bad:
        return EXIT_RESIDUE
    return _homology_exit(d.report)


def cmd_triangle(args, out):
    from .serieslab import verify_triangle

    w = verify_triangle(args.n, args.precision)
    for line in w.lines():
        out(line)
    return EXIT_OK if w.ok else EXIT_RESIDUE


def cmd_series(args, out):
    from .serieslab import check_factorizations, tile_identity_check

    rep = check_factorizations(args.precision)
    for line in rep.lines():
        out(line)
    core_ok = all(c.ok for c in rep.core)
    if args.tiles:
        for r in tile_identity_check(args.tiles):
            out(f"s={r.s:<3} {r.identity:<12} {r.reading:<8} {'pass' if r.ok else 'FAIL'}")
    return EXIT_OK if core_ok else EXIT_RESIDUE


def cmd_localmodel(args, out):
    from .localmodel import end_algebra_homology, retraction_check, verify_local_triangle

    W, N = args.window, args.precision
    ok = True
    r = verify_local_triangle(W, N)
    out(f"local triangle W={W} N={N}")
    for line in r.lines():
        out("  " + line)
    ok &= r.ok
    rr = retraction_check(W, N)
    out("retraction")
    for line in rr.lines():
        out("  " + line)
    ok &= rr.ok
    out("endomorphism homology")
    for row in end_algebra_homology(W, N):
        out(f"  {row.complex:<6} basis {row.basis_size:>4}  cycles {row.cycles}  "
            f"independent {row.independent}  spanning {row.spanning}")
        ok &= row.ok
    return EXIT_OK if ok else EXIT_RESIDUE


def cmd_selftest(args, out):
    from .acceptance import run_all

    results = run_all()
    for c in results:
        out(c.line())
    passed = sum(c.ok for c in results)
    gaps = [c for c in results if not c.ok and c.gap]
    out(f"{passed}/{len(results)} criteria pass; {len(gaps)} with a documented unattainable sub-claim")
    hard = [c for c in results if not c.ok and not c.gap]
    return EXIT_RESIDUE if hard else EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "box": cmd_box, "reduce": cmd_reduce,
    "homology": cmd_homology, "surgery": cmd_surgery, "glue": cmd_glue,
    "h1": cmd_h1, "gradings": cmd_gradings, "triangle": cmd_triangle,
    "series": cmd_series, "localmodel": cmd_localmodel, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="knotsurg", description="Knot surgery algebra toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, source=True):
        sp.add_argument("--mode", choices=("uadic", "chiral"), default=DEFAULT_MODE)
        sp.add_argument("--precision", "-N", type=int, default=DEFAULT_N)
        sp.add_argument("--window", "-W", type=int, default=DEFAULT_W)
        if source:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--file", help="module or knot file in the interchange format")
            g.add_argument("--preset", help="dinfty or a staircase preset: " + ", ".join(PRESETS))
            sp.add_argument("--framing", type=int, default=None)
            sp.add_argument("--emit", action="store_true", help="print a machine-readable result block")

    for name in ("validate", "box", "reduce", "homology", "surgery", "h1"):
        common(sub.add_parser(name))
    g = sub.add_parser("gradings")
    common(g)
    g.add_argument("--calibration", default="0")
    gl = sub.add_parser("glue")
    common(gl, source=False)
    gl.add_argument("--left", type=_knot_spec, required=True, help="NAME:FRAMING")
    gl.add_argument("--right", type=_knot_spec, required=True, help="NAME:FRAMING")
    t = sub.add_parser("triangle")
    common(t, source=False)
    t.add_argument("--n", type=int, default=0)
    s = sub.add_parser("series")
    common(s, source=False)
    s.add_argument("--tiles", type=int, default=0, help="also check tile identities up to s")
    lm = sub.add_parser("localmodel")
    lm.add_argument("--window", "-W", type=int, default=6)
    lm.add_argument("--precision", "-N", type=int, default=6)
    sub.add_parser("selftest")
    return p


def run(argv=None, out=print) -> int:
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return COMMANDS[args.command](args, out)
    except (ParseError, InputError, ValidationFailed, ValueError, KeyError) as exc:
        out(f"error: {exc}")
        return EXIT_RESIDUE if isinstance(exc, ValidationFailed) else EXIT_INPUT


def main(argv=None):
    sys.exit(run(argv))
