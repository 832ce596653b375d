"""Command-line interface.

    curvclass classify    (--builtin NAME | --file PATH) [--format text|json-doc] [--seed N]
    curvclass tensor      (--builtin NAME | --file PATH) --tensor NAME
    curvclass check       (--builtin NAME | --file PATH) --structure NAME [--format ...] [--seed N]
    curvclass corpus-list

Exit codes: 0 success, 1 usage error, 2 computation error.  Output is
byte-deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .classifiers import (
    ClassificationReport,
    STRUCTURE_NAMES,
    classify_all,
    run_structure,
)
from .context import CurvclassError
from .corpus import BUILTIN_NAMES, builtin_metric, load_metric_file
from .tensors import Geometry, MetricSpec, admissible_point, signature_at


def _add_metric_source(p: argparse.ArgumentParser):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--builtin", metavar="NAME", help="built-in metric name")
    group.add_argument("--file", metavar="PATH", help="metric file path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvclass",
        description="symbolic curvature calculus and structure classification",
    )
    parser.add_argument("--version", action="version", version=f"curvclass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="run every structure detector")
    _add_metric_source(p_classify)
    p_classify.add_argument("--format", choices=("text", "json-doc"), default="text")
    p_classify.add_argument("--seed", type=int, default=0,
                            help="seed for the randomized nondegeneracy check, echoed into the report")
    p_classify.add_argument("--num-points", type=int, default=8,
                            help="sample count for the randomized nondegeneracy check")
    p_classify.add_argument("--symmetric-only", action="store_true",
                            help="restrict compatibility spaces to symmetric (0,2) tensors")

    p_tensor = sub.add_parser("tensor", help="dump one tensor's nonzero components")
    _add_metric_source(p_tensor)
    p_tensor.add_argument("--tensor", required=True, metavar="NAME",
                          help="riemann | ricci | scalar | conformal | projective | "
                               "concircular | conharmonic | christoffel | metric | "
                               "nabla-<name> | rr | pp | qsp | ...")

    p_check = sub.add_parser("check", help="decide a single structure")
    _add_metric_source(p_check)
    p_check.add_argument("--structure", required=True, metavar="NAME")
    p_check.add_argument("--format", choices=("text", "json-doc"), default="text")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--num-points", type=int, default=8)
    p_check.add_argument("--symmetric-only", action="store_true")

    sub.add_parser("corpus-list", help="list built-in metric names")
    return parser


def _load_metric(args) -> MetricSpec:
    if args.builtin:
        return builtin_metric(args.builtin)
    with open(args.file, "r", encoding="utf-8") as handle:
        return load_metric_file(handle.read())


def _verify_nondegenerate(m: MetricSpec, seed: int, num_points: int):
    """Randomized cross-check that det(g) is nonzero on the assumed domain."""
    from .equality import EqualityConfig, NONZERO, is_zero
    from .linalg import determinant

    config = EqualityConfig(seed=seed, num_points=num_points, assumptions=m.assumptions)
    verdict = is_zero(determinant(m.g), config)
    if verdict.kind != NONZERO:
        raise CurvclassError("degenerate metric on the assumed domain")


def _cmd_classify(args, out) -> int:
    from .report import render_json, render_text

    m = _load_metric(args)
    _verify_nondegenerate(m, args.seed, args.num_points)
    report = classify_all(m, seed=args.seed, symmetric_only=args.symmetric_only)
    out.write(render_text(report) if args.format == "text" else render_json(report))
    return 0


def _cmd_tensor(args, out) -> int:
    m = _load_metric(args)
    ws = Geometry(m)
    name = args.tensor
    if name == "scalar":
        r = ws.scalar
        if not r.is_zero():
            out.write(f"r = {r}\n")
        return 0
    if name == "christoffel":
        for line in ws.gamma.dump_lines():
            out.write(line + "\n")
        return 0
    tensor, label = ws.tensor_by_name(name)
    for line in tensor.dump_lines(label):
        out.write(line + "\n")
    return 0


def _cmd_check(args, out) -> int:
    from .report import render_json, render_text

    m = _load_metric(args)
    if args.structure not in STRUCTURE_NAMES:
        raise CurvclassError(
            f"unknown structure {args.structure!r}; see `curvclass corpus-list`"
            " documentation or the README for the registry")
    _verify_nondegenerate(m, args.seed, args.num_points)
    ws = Geometry(m)
    verdict = run_structure(ws, args.structure, symmetric_only=args.symmetric_only)
    report = ClassificationReport(
        m.name, signature_at(m, admissible_point(m)), [verdict], args.seed, __version__)
    out.write(render_text(report) if args.format == "text" else render_json(report))
    return 0


def _cmd_corpus_list(out) -> int:
    for name in BUILTIN_NAMES:
        out.write(name + "\n")
    return 0


def run_cli(argv: list[str], out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "classify":
            return _cmd_classify(args, out)
        if args.command == "tensor":
            return _cmd_tensor(args, out)
        if args.command == "check":
            return _cmd_check(args, out)
        if args.command == "corpus-list":
            return _cmd_corpus_list(out)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except CurvclassError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
