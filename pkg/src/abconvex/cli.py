"""Command-line front end.

Exit codes: 0 success, 1 bad input (malformed file, dimension cap, ...),
2 a result that violates a hypothesis and carries a certificate.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import sys
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

from . import approximation as ap
from . import calculus as ca
from . import generation as ge
from . import separation as se
from . import suites
from .core import linalg as la
from .core.geometry import MAX_ENUM_DIM, DimensionCapError, EmptyPolytope, EmptySetError, PolyCone
from .core.scalars import ExtScalar, LexScalar, Q, fmt_q
from .io import ProblemError, ProblemFile, from_object, load, to_plain

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class ReportRecord:
    operation: str
    input_digest: str
    result: dict
    certificate: dict | None = None
    exit_code: int = EXIT_OK
    # name -> callable on grid points; presentation only, never serialized
    functions: dict = field(default_factory=dict)
    dim: int = 1

    def to_json(self) -> str:
        doc = {"operation": self.operation, "input_digest": self.input_digest,
               "result": to_plain(self.result), "certificate": to_plain(self.certificate),
               "exit_code": self.exit_code}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- formatting


def decimal12(q) -> str:
    if isinstance(q, ExtScalar):
        if not q.is_finite:
            return str(q)
        q = q.value
    if isinstance(q, LexScalar):
        return f"({decimal12(q.std)}, {decimal12(q.inf)})"
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = 60
        return f"{Decimal(q.numerator) / Decimal(q.denominator):.12f}"


def exact(q) -> str:
    if isinstance(q, (ExtScalar, LexScalar)):
        return str(q)
    return fmt_q(Fraction(q))


def emit_plot_data(record: ReportRecord, grid) -> str:
    """CSV with one row per grid point: coordinates, then each function exactly and as a decimal."""
    if not record.functions:
        raise UsageError(f"{record.operation} does not produce a function to sample")
    names = list(record.functions)
    coords = [f"x{i + 1}" for i in range(record.dim)] if record.dim > 1 else ["x"]
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(coords + [c for n in names for c in (n, f"{n}_decimal")])
    for x in grid:
        row = [exact(v) for v in x]
        for n in names:
            v = record.functions[n](x)
            row += [exact(v), decimal12(v)]
        w.writerow(row)
    return buf.getvalue()


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    else:
        out.append(f"  {prefix}: {json.dumps(to_plain(value))}")


def _table(record: ReportRecord) -> str:
    lines = [f"operation: {record.operation}"]
    _flatten("", record.result, lines)
    if record.certificate:
        _flatten("certificate", record.certificate, lines)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argument helpers


def parse_points(text, dim=None):
    """'1,2;3,4' -> [(1, 2), (3, 4)]; for dim 1 also '1,2,3' -> [(1,), (2,), (3,)]."""
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    if dim == 1 and ";" not in text:
        return [(Q(v),) for v in text.split(",")]
    return [tuple(Q(v) for v in p.split(",")) for p in text.split(";")]


def parse_vector(text):
    try:
        return tuple(Q(v) for v in text.split(","))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from None


def parse_matrix(text):
    return tuple(parse_vector(r) for r in text.split(";"))


def _digest(problems, extra=()):
    h = hashlib.sha256()
    for p in problems:
        h.update(p.to_json().encode())
    for e in extra:
        h.update(repr(e).encode())
    return h.hexdigest()


def _expect(problem: ProblemFile, *kinds):
    if problem.kind not in kinds:
        raise UsageError(f"expected a {' or '.join(kinds)} file, got kind {problem.kind!r}")
    return problem.build()


def _poly(obj, what="function"):
    if not isinstance(obj, ge.PolyFunc):
        raise UsageError(f"{what} must be given by affine pieces with standard coefficients")
    return obj


def _polytope_result(P):
    if isinstance(P, EmptyPolytope):
        return {"empty": True, "vertices": []}
    return {"empty": False, "vertices": sorted(P.vertices)}


def _on_grid(f):
    def at(x):
        if tuple(x) not in f.grid:
            raise UsageError(f"{exact_point(x)} is not a point of the function's grid")
        return f(x)
    return at


def exact_point(x):
    return "(" + ", ".join(exact(v) for v in x) + ")"


def _fn_pieces(f):
    return [{"slope": p.slope, "offset": p.offset} for p in f.pieces]


# ---------------------------------------------------------------- commands


def cmd_conjugate(args, problems):
    f = _expect(problems[0], "function")
    grid = parse_points(args.grid, f.dim) if args.grid else None
    duals = parse_points(args.dual_grid, f.dim) if args.dual_grid else None
    functions = {}
    if isinstance(f, ge.SampledFunc):
        duals = duals or list(f.grid)
        fs = ge.fenchel_conjugate(f, duals)
        table = dict(zip(fs.grid, fs.values))
        result = {"conjugate": [{"y": y, "value": v} for y, v in zip(fs.grid, fs.values)]}
        functions = {"f": _on_grid(f), "fstar": lambda y: table[tuple(y)] if tuple(y) in table
                     else ge.fenchel_conjugate(f, [y]).values[0]}
        if args.biconjugate:
            fss = ge.biconjugate(f)
            result["biconjugate"] = [{"x": x, "value": v} for x, v in zip(fss.grid, fss.values)]
            btab = dict(zip(fss.grid, fss.values))
            functions["fstarstar"] = lambda x: btab.get(tuple(x), ExtScalar.of("inf"))
        grid = grid if grid is not None else list(f.grid)
        finite = [(x, v.value) for x, v in zip(f.grid, f.values) if v.is_finite]
    else:
        f = _poly(f)
        conj = ge.fenchel_conjugate_poly(f)
        duals = duals or sorted(set(f.slopes))
        result = {"domain": _polytope_result(conj.domain),
                  "conjugate": [{"y": y, "value": conj(y)} for y in duals]}
        functions = {"f": f, "fstar": conj}
        finite = None
    if args.mode == "float":
        result["float"] = _float_conjugate(f, finite, duals, args.tol)
    return ReportRecord("conjugate", "", result, functions=functions, dim=f.dim), grid


def _float_conjugate(f, finite, duals, tol):
    """The definitional sup in binary floating point, compared with the exact values."""
    tol = Q(tol) if tol is not None else Fraction(1, 10 ** 9)
    rows, worst = [], Fraction(0)
    for y in duals:
        if finite is not None:
            ex = ge.fenchel_conjugate(f, [y]).values[0].value
            fl = max(sum(float(a) * float(b) for a, b in zip(y, x)) - float(v) for x, v in finite)
        else:
            val = ge.PolyConjugate(f)(y)
            if not val.is_finite:
                rows.append({"y": y, "value": "inf"})
                continue
            ex = val.value
            fl = float(ex)
        worst = max(worst, abs(Fraction(fl) - ex))
        rows.append({"y": y, "value": repr(fl)})
    return {"values": rows, "max_deviation": decimal12(worst), "within_tol": worst <= tol}


def cmd_envelope(args, problems):
    f = _expect(problems[0], "function")
    H = _expect(problems[1], "generator_set")
    env = ge.h_convex_envelope(f, H)
    U = ge.h_support_set(f, H)
    result = {"support_indices": list(U.indices), "degenerate": isinstance(env, ge.DegenerateEnvelope)}
    if isinstance(env, ge.PolyFunc):
        result["envelope"] = _fn_pieces(env)
    elif isinstance(env, ge.SampledFunc):
        result["envelope"] = [{"x": x, "value": v} for x, v in zip(env.grid, env.values)]
    result["h_convex"] = ge.is_h_convex(f, H)
    grid = parse_points(args.grid, f.dim) if args.grid else (list(f.grid) if isinstance(f, ge.SampledFunc) else None)
    functions = {"f": f, "envelope": env}
    if isinstance(f, ge.SampledFunc):
        functions = {"f": _on_grid(f), "envelope": _on_grid(env)}
    return ReportRecord("envelope", "", result, functions=functions, dim=f.dim), grid


def cmd_hsupport(args, problems):
    f = _expect(problems[0], "function")
    H = _expect(problems[1], "generator_set")
    U = ge.h_support_set(f, H)
    members = [{"slope": h.slope, "offset": h.offset} for h in U.members]
    return ReportRecord("hsupport", "", {"indices": list(U.indices), "members": members}), None


def cmd_support_fn(args, problems):
    U = _expect(problems[0], "polytope")
    p = ge.support_function(U)
    result = {"pieces": _fn_pieces(p), "problem": json.loads(from_object(p).to_json())}
    grid = parse_points(args.grid, p.dim) if args.grid else None
    return ReportRecord("support-fn", "", result, functions={"support": p}, dim=p.dim), grid


def cmd_polar(args, problems):
    K = _expect(problems[0], "cone")
    P = se.polar(K, args.max_dim)
    return ReportRecord("polar", "", {"rays": list(P.rays),
                                      "problem": json.loads(from_object(P).to_json())}), None


def cmd_nonoblate(args, problems):
    if len(problems) != 2:
        raise UsageError("nonoblate takes two cone files")
    pair = se.ConePair(_expect(problems[0], "cone"), _expect(problems[1], "cone"))
    rep = se.nonoblate_check(pair)
    result = {"nonoblate": rep.nonoblate, "span": list(rep.span),
              "k1_minus_k2_fills_span": rep.k1_minus_k2_fills_span,
              "k2_minus_k1_fills_span": rep.k2_minus_k1_fills_span, "radius": rep.radius}
    if 2 * pair.dim <= args.max_dim:
        diag = se.nonoblate_diagonal_equivalence(pair, args.max_dim)
        result["diagonal"] = {"direct": diag.direct, "lifted": diag.lifted, "agree": diag.agree}
    return ReportRecord("nonoblate", "", result), None


def cmd_genpos(args, problems):
    if len(problems) < 2:
        raise UsageError("genpos takes at least two files")
    objs = [_expect(p, "cone", "function") for p in problems]
    if all(isinstance(o, PolyCone) for o in objs):
        rep = se.general_position_check(objs, max(args.max_dim, 8))
    elif all(isinstance(o, ge.PolyFunc) for o in objs):
        rep = se.sublinear_general_position(objs, max_dim=max(args.max_dim, 8))
    else:
        raise UsageError("genpos takes either cones or sublinear functions, not a mix")
    return ReportRecord("genpos", "", {"holds": rep.holds, "span_condition": rep.span_condition,
                                       "complemented": rep.complemented, "nonoblate": rep.nonoblate,
                                       "reduced": rep.reduced}), None


def cmd_decompose(args, problems):
    cones = [_expect(p, "cone") for p in problems]
    rep = se.polar_decomposition_check(cones, args.max_dim)
    return ReportRecord("decompose", "", {"equal": rep.equal, "hypothesis": rep.hypothesis.holds,
                                          "lhs_rays": list(rep.lhs_rays), "rhs_rays": list(rep.rhs_rays)}), None


def cmd_sandwich(args, problems):
    if len(problems) == 1:
        P, Qf = _expect(problems[0], "sandwich")
    elif len(problems) == 2:
        P, Qf = _expect(problems[0], "function"), _expect(problems[1], "function")
    else:
        raise UsageError("sandwich takes one sandwich file or two function files")
    w = se.sandwich(_poly(P, "P"), _poly(Qf, "Q"))
    if w.found:
        return ReportRecord("sandwich", "", {"found": True, "t": w.t}), None
    cert = {"violation": w.violation, "P_plus_Q": w.gap, "farkas": w.certificate}
    return ReportRecord("sandwich", "", {"found": False}, cert, EXIT_VIOLATION), None


def cmd_subdiff(args, problems):
    f = _poly(_expect(problems[0], "function"))
    if args.at:
        x = parse_vector(args.at)
        P = f.subgradients(x)
        return ReportRecord("subdiff", "", {"at": x, **_polytope_result(P)}), None
    P = ca.support_set(f)
    return ReportRecord("subdiff", "", {"at": "support set", **_polytope_result(P)}), None


def cmd_cop(args, problems):
    fam = _expect(problems[0], "operator_family")
    H = ca.support_hull(fam)
    result = {"rows": [sorted(P.vertices) for P in H.rows]}
    if args.member:
        T = parse_matrix(args.member)
        result["member"] = {"matrix": T, "in_cop": T in H, "dominated": H.dominated(T),
                            "in_conv": H.in_convex_hull(T)}
    return ReportRecord("cop", "", result), None


def cmd_compose(args, problems):
    p1, p2 = _expect(problems[0], "composition")
    p1 = [_poly(f, "p1") for f in p1]
    p2 = _poly(p2, "p2")
    negative = [(k, j) for k, s in enumerate(p2.slopes) for j, a in enumerate(s) if a < 0]
    if negative:
        k, j = negative[0]
        cert = {"reason": "p2 is not increasing", "piece": k, "coordinate": j, "slope": p2.slopes[k]}
        return ReportRecord("compose", "", {"applicable": False}, cert, EXIT_VIOLATION), None
    c = ca.composition_subdifferential(p1, p2)
    result = {"applicable": True, **_polytope_result(c.direct),
              "direct_in_formula": c.direct_in_formula}
    if c.dim + 1 <= args.max_dim:
        result["formula_in_direct"] = c.formula_in_direct
        result["agree"] = result["direct_in_formula"] and result["formula_in_direct"]
    if args.member:
        t = parse_vector(args.member)
        result["member"] = {"t": t, "direct": t in c, "formula": c.formula_contains(t)}
    return ReportRecord("compose", "", result), None


def cmd_epsdiff(args, problems):
    f = _poly(_expect(problems[0], "function"))
    if not args.at or args.eps is None:
        raise UsageError("epsdiff needs --at and --eps")
    E = ap.eps_subdifferential(f, parse_vector(args.at), Q(args.eps))
    result = {"at": E.point, "eps": E.eps, **_polytope_result(E.polytope)}
    if f.dim == 1:
        result["interval"] = E.interval()
    if args.member:
        y = parse_vector(args.member)
        result["member"] = {"y": y, "conjugate_route": y in E, "direct_route": E.direct_contains(y)}
    return ReportRecord("epsdiff", "", result), None


def cmd_dsubdiff(args, problems):
    f = _expect(problems[0], "function")
    if isinstance(f, ge.PolyFunc):
        f = ap.LexPolyFunc.lift(f)
    if not isinstance(f, ap.LexPolyFunc):
        raise UsageError("dsubdiff needs a function given by pieces")
    if not args.at:
        raise UsageError("dsubdiff needs --at")
    x = parse_vector(args.at)
    D = ap.infinitesimal_subdifferential(f, x)
    return ReportRecord("dsubdiff", "", {"at": x, **_polytope_result(D),
                                         "infinitesimal_minimum": ap.is_infinitesimal_minimum(f, x)}), None


def _convolution_inputs(problems, args):
    if len(problems) == 1:
        p = _expect(problems[0], "convolution")
        return p["f1"], p["f2"], p["mode"], p.get("y_grid"), p.get("point")
    if len(problems) == 2:
        f1, f2 = _expect(problems[0], "function"), _expect(problems[1], "function")
        y_grid = parse_points(args.y_grid, 1) if getattr(args, "y_grid", None) else None
        return f1, f2, "grid" if y_grid else "polyhedral", y_grid, None
    raise UsageError("give one convolution file or two function files")


def cmd_convolve(args, problems):
    f1, f2, mode, y_grid, point = _convolution_inputs(problems, args)
    conv = ap.infimal_convolution(f1, f2, mode, y_grid)
    ats = [parse_vector(a) for a in (args.at or [])]
    if not ats and point is not None:
        ats = [(point[0], point[2])]
    if not ats:
        raise UsageError("convolve needs --at X,Z (repeatable) or a point in the file")
    evals = []
    for x, z in ats:
        r = conv.evaluate(x, z)
        evals.append({"x": x, "z": z, "value": r.value, "witness": r.witness, "exactness": r.exactness})
    return ReportRecord("convolve", "", {"mode": mode, "evaluations": evals}), None


def cmd_chainrule(args, problems):
    f1, f2, mode, _, point = _convolution_inputs(problems, args)
    if args.point:
        point = parse_vector(args.point)
    if point is None or len(point) != 3:
        raise UsageError("chainrule needs --point X,Y,Z")
    rep = ap.chain_rule_check(_poly(f1, "f1"), _poly(f2, "f2"), point)
    result = {"point": rep.point, "value": rep.value, "exactness": rep.exactness,
              "general_position": rep.general_position, "equal": rep.equal,
              "lhs": _polytope_result(rep.lhs.polytope), "rhs": _polytope_result(rep.rhs.polytope)}
    if rep.hypotheses_hold:
        return ReportRecord("chainrule", "", result), None
    x, y, z = rep.point
    attained = f1((x, y)) + f2((y, z))
    cert = {"exactness": rep.exactness, "convolution_value": rep.value, "value_at_point": attained,
            "general_position": rep.general_position}
    return ReportRecord("chainrule", "", result, cert, EXIT_VIOLATION), None


def cmd_check(args, problems):
    names = list(suites.SUITES) if args.suite == "all" else args.suite.split(",")
    unknown = [n for n in names if n not in suites.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from all, {', '.join(suites.SUITES)}")
    results = suites.run_all(names, args.seed)
    rows = {r.name: {"status": "PASS" if r.passed else "FAIL", "stats": r.stats,
                     "failures": r.failures} for r in results}
    ok = all(r.passed for r in results)
    rec = ReportRecord("check", "", {"seed": args.seed, "suites": rows, "all_passed": ok},
                       None if ok else {"failed": [r.name for r in results if not r.passed]},
                       EXIT_OK if ok else EXIT_VIOLATION)
    return rec, None


COMMANDS = {
    "conjugate": (cmd_conjugate, "Fenchel conjugate (and biconjugate) of a function", 1, 1),
    "envelope": (cmd_envelope, "H-convex envelope of a function: FUNCTION GENERATORS", 2, 2),
    "hsupport": (cmd_hsupport, "H-support set: FUNCTION GENERATORS", 2, 2),
    "support-fn": (cmd_support_fn, "support function of a polytope", 1, 1),
    "polar": (cmd_polar, "polar cone", 1, 1),
    "nonoblate": (cmd_nonoblate, "nonoblateness of a cone pair", 2, 2),
    "genpos": (cmd_genpos, "general position of cones or sublinear functions", 2, None),
    "decompose": (cmd_decompose, "polar of an intersection vs sum of polars", 2, None),
    "sandwich": (cmd_sandwich, "linear functional between -Q and P", 1, 2),
    "subdiff": (cmd_subdiff, "support set, or subgradients --at a point", 1, 1),
    "cop": (cmd_cop, "support hull of an operator family", 1, 1),
    "compose": (cmd_compose, "support set of a composition, two ways", 1, 1),
    "epsdiff": (cmd_epsdiff, "eps-subdifferential", 1, 1),
    "dsubdiff": (cmd_dsubdiff, "infinitesimal subdifferential", 1, 1),
    "convolve": (cmd_convolve, "infimal convolution", 1, 2),
    "chainrule": (cmd_chainrule, "chain rule for infimal convolution", 1, 2),
    "check": (cmd_check, "run the invariant suites", 0, 0),
}

FLOAT_COMMANDS = {"conjugate"}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", metavar="PATH", help="write plot data (function results) as CSV")
    common.add_argument("--json", metavar="PATH", help="write the report as JSON")
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--tol", metavar="RATIONAL", help="float mode tolerance (default 1/10^9)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--max-dim", type=int, default=MAX_ENUM_DIM, dest="max_dim",
                        help="cap on ambient dimension for vertex/ray enumeration")
    parser = argparse.ArgumentParser(prog="abconvex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_, lo, hi) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if hi != 0:
            p.add_argument("files", nargs="+", metavar="FILE")
        if name in ("conjugate", "envelope", "support-fn"):
            p.add_argument("--grid", help="sample points for CSV, e.g. '-1,0,1' or '0,0;1,0'")
        if name == "conjugate":
            p.add_argument("--dual-grid", dest="dual_grid")
            p.add_argument("--biconjugate", action="store_true")
        if name in ("subdiff", "epsdiff", "dsubdiff"):
            p.add_argument("--at", help="base point, e.g. '1/2,0'")
        if name == "epsdiff":
            p.add_argument("--eps")
        if name in ("epsdiff", "compose", "cop"):
            p.add_argument("--member", help="vector (or matrix 'a,b;c,d' for cop) to test")
        if name == "convolve":
            p.add_argument("--at", action="append", help="X,Z evaluation point (repeatable)")
        if name in ("convolve", "chainrule"):
            p.add_argument("--y-grid", dest="y_grid", help="finite y grid; polyhedral mode if absent")
        if name == "chainrule":
            p.add_argument("--point", help="X,Y,Z")
        if name == "check":
            p.add_argument("--suite", default="all")
    return parser


_VALUE_OPTIONS = {"--grid", "--dual-grid", "--at", "--eps", "--member", "--y-grid", "--point", "--tol"}


def _glue_values(argv):
    # argparse would read '-1,0,1' as an option flag; '--grid=-1,0,1' is unambiguous
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_values(sys.argv[1:] if argv is None else list(argv)))
    fn, _, lo, hi = COMMANDS[args.command]
    try:
        if args.mode == "float" and args.command not in FLOAT_COMMANDS:
            raise UsageError("float mode is only available for conjugate")
        if args.tol is not None and args.mode != "float":
            raise UsageError("--tol only applies in float mode")
        files = getattr(args, "files", [])
        if len(files) < lo or (hi is not None and len(files) > hi):
            raise UsageError(f"{args.command} takes {lo}{'' if hi == lo else '+' if hi is None else f'-{hi}'} file(s)")
        problems = [load(path) for path in files]
        record, grid = fn(args, problems)
        record.input_digest = _digest(problems, (args.command, args.seed) if args.command == "check" else ())
        if args.csv:
            text = emit_plot_data(record, grid or [])
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(record.to_json())
        out.write(_table(record) if args.command != "check" else _check_table(record))
        return record.exit_code
    except (ProblemError, UsageError, DimensionCapError, EmptySetError, ValueError, TypeError,
            OSError) as exc:
        err.write(f"abconvex {args.command}: error: {exc}\n")
        return EXIT_INPUT


def _check_table(record):
    lines = [f"{'suite':<15}{'status':<8}checks"]
    for name, row in record.result["suites"].items():
        total = sum(v for k, v in row["stats"].items() if not k.endswith("_failed"))
        lines.append(f"{name:<15}{row['status']:<8}{total}")
        lines += [f"    {f}" for f in row["failures"]]
    return "\n".join(lines) + "\n"


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
