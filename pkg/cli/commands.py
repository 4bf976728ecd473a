"""
Commands Module
Argument parsing and the sub-commands of the januarial tool.

Exit codes: 0 success, 1 identity or certification failure, 2 input error.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from census_engine import CensusEngine, hecke_rows, summarize
from .report_format import companion_dot, dump_json, format_table, rows_json, write_dot
from config import Settings
from embedding import TriangleAction, diagram_to_dot
from errors import EXIT_IDENTITY_FAILURE, EXIT_INPUT_ERROR, EXIT_OK, JanuarialError, ParseError
from families import FamilySpec, family_action
from perm_core import PointSet
from topology import Classification, JanuarialReport, analyze, reference_report

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: bool = False, level: Optional[str] = None) -> None:
    """Route log records to stderr; stdout carries only results."""
    if level:
        numeric = getattr(logging, level.upper(), None)
        if not isinstance(numeric, int):
            raise ParseError(f"unknown log level {level!r}")
    else:
        numeric = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(level=numeric, stream=sys.stderr, format=LOG_FORMAT, force=True)


def _read_action_file(path: str) -> Dict[str, str]:
    """Lines ``x=...``, ``y=...`` and optionally ``points=...``; '#' starts a comment."""
    fields: Dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or key.strip() not in ("x", "y", "points"):
            raise ParseError(f"{path}: unexpected line {raw!r}")
        fields[key.strip()] = value.strip()
    if "x" not in fields or "y" not in fields:
        raise ParseError(f"{path}: both x= and y= are required")
    return fields


def _export(result: Classification, dot: Optional[str], companion: Optional[str]) -> None:
    if dot:
        written = write_dot(diagram_to_dot(result.diagram), dot)
        logger.info("diagram written to %s", written)
    if companion:
        written = write_dot(companion_dot(result), companion)
        logger.info("companion graph written to %s", written)


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> int:
    if args.file:
        fields = _read_action_file(args.file)
    elif args.x is not None and args.y is not None:
        fields = {"x": args.x, "y": args.y}
    else:
        raise ParseError("analyze needs --x and --y, or --file")
    points = args.points or fields.get("points")
    if points is None and args.p is not None:
        points = f"pl:{args.p}"
    domain = PointSet.parse(points) if points else None

    action = TriangleAction.parse(fields["x"], fields["y"], domain=domain,
                                  k=args.k, ell=args.l, p=args.p)
    result = analyze(action, p=args.p)
    _export(result, args.dot, args.companion_dot)
    print(result.report.to_json())
    return EXIT_OK


def cmd_hecke(args: argparse.Namespace, settings: Settings) -> int:
    rows = hecke_rows(args.p, args.k, theta=args.theta, b=args.b, max_solutions=args.max_solutions)
    summaries = [summarize(args.p, args.k, rows)]
    if args.table:
        sys.stdout.write(format_table([r.report for r in rows], summaries))
    else:
        print(rows_json(rows, summaries))
    return EXIT_OK


def cmd_family(args: argparse.Namespace, settings: Settings) -> int:
    spec = FamilySpec.for_k(args.k)
    action = family_action(args.k, settings=settings)
    result = analyze(action)
    report = result.report
    if not report.is_simple or report.h != 1 or len(action.domain) != spec.point_count:
        logger.error("family member for k=%d is %s on %d points", args.k, report.signature(),
                     len(action.domain))
        print(report.to_json())
        return EXIT_IDENTITY_FAILURE
    _export(result, args.dot, args.companion_dot)
    print(report.to_json())
    return EXIT_OK


def cmd_census(args: argparse.Namespace, settings: Settings) -> int:
    if args.workers is not None:
        settings = replace(settings, workers=max(1, args.workers))
    engine = CensusEngine(settings)
    engine.set_progress_callback(
        lambda p, k, done, total: logger.debug("census cell p=%d k=%d (%d/%d)", p, k, done, total))
    engine.set_error_callback(lambda message: logger.error("census: %s", message))
    rows, summaries = engine.run(args.p_max, args.k_max, max_solutions=args.max_solutions)
    if args.table:
        sys.stdout.write(format_table([r.report for r in rows], summaries))
    else:
        print(rows_json(rows, summaries))
    failed = [s for s in summaries if not s.conserved]
    return EXIT_IDENTITY_FAILURE if failed else EXIT_OK


def _comparable(report: JanuarialReport) -> Dict:
    data = report.to_dict()
    data["checks"] = {k: v for k, v in data["checks"].items() if k != "prop6"}
    return data


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    try:
        text = Path(args.report).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {args.report}: {e}") from e
    stored = JanuarialReport.from_json(text)
    fresh = reference_report(stored)
    want, got = _comparable(stored), _comparable(fresh)
    diffs = sorted(key for key in set(want) | set(got) if want.get(key) != got.get(key))
    if diffs:
        for key in diffs:
            logger.error("field %s: stored %r, recomputed %r", key, want.get(key), got.get(key))
        print(dump_json({"verified": False, "mismatched": diffs}))
        return EXIT_IDENTITY_FAILURE
    print(dump_json({"verified": True, "signature": fresh.signature(), "genus": fresh.genus}))
    return EXIT_OK


def _positive_k(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k {text!r}") from None
    if k < 3:
        raise argparse.ArgumentTypeError(f"k must be at least 3, got {k}")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="januarial",
        description="Construct, embed and classify januarials of triangle-group actions",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    parser.add_argument("--log-level", default=None, help="Explicit log level (e.g. INFO)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # analyze
    p_an = subparsers.add_parser("analyze", help="Classify a hand-entered action")
    p_an.add_argument("--x", type=str, default=None, help="Cycles of x, e.g. '(1,5)(3,4)'")
    p_an.add_argument("--y", type=str, default=None, help="Cycles of y")
    p_an.add_argument("--file", type=str, default=None,
                      help="File with x=..., y=... and optional points=... lines")
    p_an.add_argument("--points", type=str, default=None,
                      help="Point set: pl:P, A..B or a comma list (default: labels used)")
    p_an.add_argument("--p", type=int, default=None,
                      help="Treat the action as a Hecke action on PL(F_p) and check the genus formula")
    p_an.add_argument("--k", type=int, default=None, help="Required exact order of y")
    p_an.add_argument("--l", type=int, default=None, help="Required exact order of xy")
    p_an.add_argument("--dot", type=str, default=None, help="Write the coset diagram (.dot or .svg)")
    p_an.add_argument("--companion-dot", type=str, default=None, help="Write the companion graph")
    p_an.set_defaults(handler=cmd_analyze)

    # hecke
    p_he = subparsers.add_parser("hecke", help="Hecke construction on PL(F_p)")
    p_he.add_argument("--p", type=int, required=True, help="Odd prime")
    p_he.add_argument("--k", type=_positive_k, required=True, help="Order of y")
    p_he.add_argument("--max-solutions", type=int, default=None,
                      help="Distinct actions kept per theta (default: all)")
    p_he.add_argument("--theta", type=int, default=None, help="Only this primitive root")
    p_he.add_argument("--b", type=int, default=None, help="Only this trace of Y")
    fmt = p_he.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON rows (default)")
    fmt.add_argument("--table", action="store_true", help="Human-readable table")
    p_he.set_defaults(handler=cmd_hecke)

    # family
    p_fa = subparsers.add_parser("family", help="Single-circuit family member for k")
    p_fa.add_argument("--k", type=_positive_k, required=True, help="k >= 3")
    p_fa.add_argument("--dot", type=str, default=None, help="Write the coset diagram (.dot or .svg)")
    p_fa.add_argument("--companion-dot", type=str, default=None, help="Write the companion graph")
    p_fa.set_defaults(handler=cmd_family)

    # census
    p_ce = subparsers.add_parser("census", help="Sweep the Hecke construction")
    p_ce.add_argument("--p-max", type=int, required=True, help="Largest prime")
    p_ce.add_argument("--k-max", type=int, required=True, help="Largest k")
    p_ce.add_argument("--max-solutions", type=int, default=None,
                      help="Distinct actions per theta and cell (default: from settings)")
    p_ce.add_argument("--workers", type=int, default=None, help="Worker threads")
    fmt = p_ce.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON rows and summary (default)")
    fmt.add_argument("--table", action="store_true", help="Human-readable table")
    p_ce.set_defaults(handler=cmd_census)

    # verify
    p_ve = subparsers.add_parser("verify", help="Recompute a saved report and compare")
    p_ve.add_argument("--report", type=str, required=True, help="Report JSON file")
    p_ve.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        configure_logging(args.verbose, args.log_level)
        settings = Settings.from_env()
        return args.handler(args, settings)
    except JanuarialError as e:
        logger.error("%s", e)
        dump = getattr(e, "dump", None)
        if dump:
            logger.error("dump: %s", dump)
        return e.exit_code
    except ValueError as e:
        logger.error("%s", e)
        return EXIT_INPUT_ERROR


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
