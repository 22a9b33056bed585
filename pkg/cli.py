"""
Command-line front end: classify, groupoid, verify and cayley
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import settings
from exceptions import AdmissibilityError, OperatorAlgebraError
from isometries import FamilyAnalyzer, cayley_suite, load_family
from schemas import Report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isometries",
        description="Classify C*-algebras generated by families of partial isometries",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    parser.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def family_command(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("file", type=Path, help="family file (TOML)")
        cmd.add_argument("--depth", type=int, help="truncation depth of finite-shift chains")
        cmd.add_argument("--max-len", type=int, help="bound on reduced word length")
        cmd.add_argument("--tol", type=float, help="numerical tolerance")
        return cmd

    family_command("classify", "indices, G-graph and block structure")
    groupoid = family_command("groupoid", "enumerate the graph groupoid")
    groupoid.add_argument("--emit-dot", action="store_true", help="write the G-graph as DOT")
    groupoid.add_argument("--dot-out", type=Path, help="DOT path, defaults to the family file with .dot")
    family_command("verify", "check symbolic predictions against the matrix oracle")

    cayley = sub.add_parser("cayley", help="Cayley transform and defect checks")
    cayley.add_argument("--dim", type=int, default=settings.DEFAULT_CAYLEY_DIM)
    cayley.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    cayley.add_argument("--tol", type=float, help="roundtrip tolerance")
    cayley.add_argument("--instances", type=int, default=settings.CAYLEY_INSTANCES,
                        help="random draws per check")
    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.INFO if verbose else getattr(logging, settings.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _positive(name: str, value) -> None:
    if value is not None and value <= 0:
        raise OperatorAlgebraError(f"--{name} must be positive, got {value}")


def run(args: argparse.Namespace) -> Report:
    if args.command == "cayley":
        _positive("dim", args.dim)
        _positive("tol", args.tol)
        _positive("instances", args.instances)
        return cayley_suite(args.dim, args.seed, args.tol, args.instances)

    for name in ("depth", "max_len", "tol"):
        _positive(name.replace("_", "-"), getattr(args, name))
    family = load_family(args.file)
    analyzer = FamilyAnalyzer(family, depth=args.depth, max_len=args.max_len, tol=args.tol)

    if args.command == "classify":
        return analyzer.classify()
    if args.command == "verify":
        return analyzer.verify()

    report, dot = analyzer.groupoid(emit_dot=args.emit_dot)
    if dot is not None:
        dot_path = args.dot_out or args.file.with_suffix(".dot")
        dot_path.write_text(dot, encoding="utf-8")
        report.results["dot_file"] = str(dot_path)
        logger.info(f"Wrote {dot_path}")
    return report


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        report = run(args)
    except AdmissibilityError as e:
        for violation in e.violations:
            print(f"error: {violation}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OperatorAlgebraError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    text = json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True)
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK if report.status == "ok" else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
