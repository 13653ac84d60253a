"""Command-line surface.

One binary, subcommands: validate, telescope, analyze, separate, properify,
realize, verify, decide, k0, gen, export-dot.  Exit codes: 0 success,
1 validation/certificate failure, 2 parse error, 3 precondition failure,
4 depth insufficiency.  All outputs are byte-deterministic given input and
flags; color (status lines on stderr only) is suppressed by NO_COLOR.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import jsonio
from .decide import classify, realize_auto
from .dot import export_dot
from .errors import AfGraphError, DepthError, InvalidDiagramError, PreconditionError, SchemaError
from .fixtures import FIXTURE_NAMES, fixture, random_diagram
from .ideals import detect_mk_tail, is_unital, recognize_separated, row_set
from .ktheory import corner_graph, monoid_contains, source_positive, unit_normalize
from .model import BratteliDiagram
from .realize import realize_separated, realize_strict, verify_realization
from .separation import check_property_6prime, properify, separate
from .telescope import Subsequence, telescope

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_DEPTH = 4


def _color_enabled() -> bool:
    return sys.stderr.isatty() and not os.environ.get("NO_COLOR")


def _status(message: str, ok: bool) -> None:
    if _color_enabled():
        code = "32" if ok else "31"
        message = f"\x1b[{code}m{message}\x1b[0m"
    print(message, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError("", f"cannot read {path}: {exc.strerror}") from None


def _load_diagram(path: str) -> BratteliDiagram:
    return jsonio.parse_diagram(_read(path))


def _parse_vector(text: str) -> dict[str, int]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("/vector", f"not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict) or not all(
        isinstance(k, str) and isinstance(v, int) and not isinstance(v, bool) for k, v in obj.items()
    ):
        raise SchemaError("/vector", "expected a map of vertex labels to integers")
    return obj


def cmd_validate(args) -> int:
    try:
        _load_diagram(args.input)
    except InvalidDiagramError as exc:
        payload = {
            "valid": False,
            "violations": [
                {"code": v.code, "level": v.level, "vertex": v.vertex, "message": v.message}
                for v in exc.report.violations
            ],
        }
        _emit(jsonio.dumps(payload), args.out)
        _status("INVALID", ok=False)
        return EXIT_INVALID
    _emit(jsonio.dumps({"valid": True, "violations": []}), args.out)
    _status("valid", ok=True)
    return EXIT_OK


def cmd_telescope(args) -> int:
    d = _load_diagram(args.input)
    s = Subsequence.parse(args.levels)
    out = telescope(d, s, depth=args.depth)
    if d.tail is not None and out.tail is None:
        _status("note: output is a finite window (tail dropped by this selection)", ok=True)
    _emit(jsonio.serialize_diagram(out), args.out)
    return EXIT_OK


def _analysis_payload(d: BratteliDiagram, depth: int) -> dict:
    unital = is_unital(d, depth)
    rec = recognize_separated(d, depth)
    payload = {
        "depth": depth,
        "unital": unital.status,
        "separated": None,
        "mk_tail": None,
        "p6prime": None,
    }
    if rec is not None:
        ss, proper = rec
        payload["separated"] = {"k": ss.k, "proper": proper, "y_labels": list(ss.y_labels)}
        h_sets = ss.h_sets(d, depth)
        found = detect_mk_tail(d, h_sets, depth)
        payload["mk_tail"] = list(found) if found else None
        ok, offenders = check_property_6prime(d, ss, depth)
        payload["p6prime"] = ok
        if not ok:
            payload["p6prime_offenders"] = [[n, lab] for n, lab in offenders]
    return payload


def cmd_analyze(args) -> int:
    d = _load_diagram(args.input)
    payload = _analysis_payload(d, args.depth)
    text = jsonio.dumps(payload)
    _emit(text, args.out)
    if args.report_dir:
        from .report import write_report

        write_report(args.report_dir, d, args.depth, text)
    return EXIT_OK


def cmd_separate(args) -> int:
    d = _load_diagram(args.input)
    rows = frozenset(part for part in args.rows.split(",") if part)
    s = row_set(d, rows, args.depth)
    if args.k is not None:
        k = args.k
    else:
        found = detect_mk_tail(d, s, args.depth)
        if found is None:
            raise PreconditionError("no constant-degree complement tail; pass --k to insist")
        k = found[1]
    out, ss = separate(d, s, k, args.depth)
    _emit(jsonio.serialize_diagram(out), args.out)
    _status(f"separated with k={ss.k}", ok=True)
    return EXIT_OK


def cmd_properify(args) -> int:
    d = _load_diagram(args.input)
    rec = recognize_separated(d, args.depth)
    if rec is None:
        raise PreconditionError("diagram is not separated at this depth")
    out, trace = properify(d, rec[0], args.depth)
    _emit(jsonio.serialize_diagram(out), args.out)
    if args.trace:
        Path(args.trace).write_text(jsonio.dumps(trace.to_dict()), encoding="utf-8")
    return EXIT_OK


def cmd_realize(args) -> int:
    d = _load_diagram(args.input)
    if args.mode == "strict":
        rg = realize_strict(d)
    else:
        rec = recognize_separated(d, args.depth)
        if rec is None:
            raise PreconditionError("diagram is not separated at this depth")
        if not rec[1]:
            raise PreconditionError("diagram is separated but not proper; run properify first")
        rg = realize_separated(d, rec[0])
    mr = rg.materialize(args.depth)
    _emit(jsonio.serialize_realization(mr), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    mr = jsonio.parse_realization(_read(args.graph))
    d = _load_diagram(args.diagram)
    cert = verify_realization(mr, d, args.depth)
    _emit(jsonio.dumps(cert.to_dict()), args.out)
    _status("certificate PASS" if cert.passed else "certificate FAIL", ok=cert.passed)
    return EXIT_OK if cert.passed else EXIT_INVALID


def cmd_decide(args) -> int:
    d = _load_diagram(args.input)
    report = classify(d, args.depth)
    payload = report.to_dict()
    realization = None
    if args.realize:
        graph, cert, built_from = realize_auto(d, args.depth)
        realization = graph.materialize(args.depth)
        payload["certificate"] = {"passed": cert.passed, "total_checks": len(cert.checks)}
        if args.out:
            Path(args.out).write_text(jsonio.serialize_realization(realization), encoding="utf-8")
    text = jsonio.dumps(payload)
    if args.realize and args.out:
        sys.stdout.write(text)
    else:
        _emit(text, args.out)
    if args.report_dir:
        from .report import write_report

        write_report(args.report_dir, d, args.depth, text, realization=realization)
    _status(f"verdict: {report.verdict}", ok=report.verdict.startswith("Realizable"))
    return EXIT_OK


def cmd_k0(args) -> int:
    g = jsonio.parse_graph(_read(args.graph))
    vec = _parse_vector(args.vector)
    if args.op == "member":
        member, cert = monoid_contains(g, vec)
        _emit(jsonio.dumps(cert.to_dict()), args.out)
        _status("member" if member else "not a member", ok=member)
        return EXIT_OK
    if args.op == "normalize":
        norm = unit_normalize(g, vec)
        payload = norm.to_dict()
        payload["source_positive"] = source_positive(g, vec)
        _emit(jsonio.dumps(payload), args.out)
        return EXIT_OK
    out = corner_graph(g, vec)
    _emit(jsonio.serialize_graph(out), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.fixture:
        obj = fixture(args.fixture)
        if isinstance(obj, BratteliDiagram):
            _emit(jsonio.serialize_diagram(obj), args.out)
        else:
            _emit(jsonio.serialize_graph(obj), args.out)
        return EXIT_OK
    if not args.random:
        raise PreconditionError("pass --fixture NAME or --random")
    d = random_diagram(
        args.seed,
        levels=args.levels,
        max_width=args.width,
        max_mult=args.mult,
        strict=args.strict,
        separated=args.separated,
    )
    _emit(jsonio.serialize_diagram(d), args.out)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    if bool(args.input) == bool(args.graph):
        raise PreconditionError("pass exactly one of --in (diagram) or --graph")
    if args.input:
        d = _load_diagram(args.input)
        depth = args.depth if args.depth is not None else (d.prefix_depth if d.tail is None else 6)
        text = export_dot(d, depth)
    else:
        g = jsonio.parse_graph(_read(args.graph))
        text = export_dot(g)
    _emit(text, args.out)
    return EXIT_OK


def _add_common(p, depth_default=6, depth_required=False):
    if depth_required:
        p.add_argument("--depth", type=int, required=True, help="number of levels to inspect")
    else:
        p.add_argument("--depth", type=int, default=depth_default, help="number of levels to inspect")
    p.add_argument("--out", help="write the primary output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afgraph",
        description="Decide when a leveled AF-algebra diagram presents a graph C*-algebra and build the witnessing graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the structural axioms of a diagram")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("telescope", help="telescope a diagram along a level subsequence")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--levels", required=True, help='explicit "1,3,5" or arithmetic "start:step"')
    p.add_argument("--depth", type=int, default=None, help="materialize the output to this many levels")
    p.add_argument("--out")
    p.set_defaults(func=cmd_telescope)

    p = sub.add_parser("analyze", help="unitality, separated split, and defect-condition report")
    p.add_argument("--in", dest="input", required=True)
    _add_common(p)
    p.add_argument("--report-dir", help="also write report.json, vertices.csv, and figures here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("separate", help="telescope into separated form against a given ideal row set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rows", required=True, help="comma-separated labels of the ideal rows")
    p.add_argument("--k", type=int, default=None, help="expected chain degree (default: detected)")
    _add_common(p)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("properify", help="remove chain-funded zero-defect vertices, rerouting their weight")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trace", help="write the replayable construction trace here")
    _add_common(p)
    p.set_defaults(func=cmd_properify)

    p = sub.add_parser("realize", help="build the witnessing graph from a diagram")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=("separated", "strict"), required=True)
    _add_common(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="replay a realization against its source diagram")
    p.add_argument("--graph", required=True)
    p.add_argument("--diagram", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decide", help="classify a diagram and optionally realize it")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--realize", action="store_true", help="dispatch to the applicable construction")
    _add_common(p)
    p.add_argument("--report-dir", help="also write report.json, vertices.csv, and figures here")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("k0", help="positive-cone monoid operations on amplified graphs")
    p.add_argument("op", choices=("member", "normalize", "corner"))
    p.add_argument("--graph", required=True)
    p.add_argument("--vector", required=True, help='JSON map, e.g. \'{"v": 3, "w": 2}\'')
    p.add_argument("--out")
    p.set_defaults(func=cmd_k0)

    p = sub.add_parser("gen", help="emit a named fixture or a seeded random diagram")
    p.add_argument("--fixture", choices=FIXTURE_NAMES)
    p.add_argument("--random", action="store_true")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--width", type=int, default=4, help="maximum vertices per level")
    p.add_argument("--mult", type=int, default=3, help="maximum edge multiplicity")
    p.add_argument("--strict", action="store_true", help="force degree >= 2 and positive defects")
    p.add_argument("--separated", type=int, default=None, metavar="K", help="force a separated split with chain degree K")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("export-dot", help="render a diagram or graph as DOT")
    p.add_argument("--in", dest="input")
    p.add_argument("--graph")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        _status(str(exc), ok=False)
        return EXIT_PARSE
    except InvalidDiagramError as exc:
        _status(str(exc), ok=False)
        return EXIT_INVALID
    except DepthError as exc:
        _status(f"depth insufficiency: {exc}", ok=False)
        return EXIT_DEPTH
    except PreconditionError as exc:
        _status(f"precondition failed: {exc}", ok=False)
        return EXIT_PRECONDITION
    except AfGraphError as exc:
        _status(str(exc), ok=False)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
