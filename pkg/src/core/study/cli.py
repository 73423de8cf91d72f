"""Command-line entry: ``python main.py <approx|compare|bvp|shape|verify|serve> ...``"""

import argparse
import logging
import sys
from typing import Callable, Optional, Sequence

from src.common.errors import FcGramError
from src.common.settings import Settings
from src.core.fc.grid_core import MAX_BASIS_SIZE
from src.core.fc.shape_functions import FamilyTag, ShapeFamily, family_from_name, load_shape_config
from src.core.study.harness import (
    StudyKind,
    StudySpec,
    detect_stagnation,
    parse_n_range,
    run_convergence,
    run_family_comparison,
    run_shape_dump,
    verify_invariants,
    verify_published_tables,
    write_comparison_csv,
    write_csv,
    write_shape_csv,
)
from src.core.study.registry import parse_params

logger = logging.getLogger(__name__)

FAMILY_CHOICES = [tag.value for tag in FamilyTag]


def _add_shape_arguments(parser: argparse.ArgumentParser, default_family: str = "beta") -> None:
    parser.add_argument("--d", type=int, default=5, help=f"number of Gram polynomials (2..{MAX_BASIS_SIZE})")
    parser.add_argument("--b", default="2", help="extension period as a rational, e.g. 2, 3/2, 5/4")
    parser.add_argument("--family", choices=FAMILY_CHOICES, default=default_family)
    parser.add_argument("--shape-config", help="file of 'ell mu sigma_tilde' lines for the beta family")


def _add_sweep_arguments(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument("--n-range", default="2^6:2^12", help="doubling range, e.g. 2^6:2^12")
    parser.add_argument("--ref-grid", type=int, default=settings.ref_grid, help="reference grid size N")
    parser.add_argument("--workers", type=int, default=settings.workers)
    parser.add_argument("--out", help="CSV output path (stdout when omitted)")


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcgram", description="FC-Gram Fourier continuation studies")
    sub = parser.add_subparsers(dest="command", required=True)

    approx = sub.add_parser("approx", help="function approximation convergence sweep")
    approx.add_argument("--function", required=True, dest="target")
    approx.add_argument("--fparam", action="append", default=[], help="function parameter k=v (repeatable)")
    _add_shape_arguments(approx)
    _add_sweep_arguments(approx, settings)

    compare = sub.add_parser("compare", help="same sweep for several shape families")
    compare.add_argument("--function", required=True, dest="target")
    compare.add_argument("--fparam", action="append", default=[])
    compare.add_argument("--families", default="beta,hermite", help="comma-separated family names")
    _add_shape_arguments(compare)
    _add_sweep_arguments(compare, settings)

    bvp = sub.add_parser("bvp", help="boundary value problem convergence sweep")
    bvp.add_argument("--problem", required=True, dest="target")
    bvp.add_argument("--pparam", action="append", default=[], help="problem parameter k=v (repeatable)")
    bvp.add_argument("--large", action="store_true", help=f"allow n above {settings.bvp_max_n}")
    _add_shape_arguments(bvp)
    _add_sweep_arguments(bvp, settings)
    bvp.set_defaults(n_range="2^6:2^10")

    shape = sub.add_parser("shape", help="tabulate a shape function and its continuation on [1, b]")
    _add_shape_arguments(shape)
    shape.add_argument("--n", type=int, default=32, help="grid size fixing the matching width (d-1)/n")
    shape.add_argument("--ell", type=int, default=0)
    shape.add_argument("--samples", type=int, default=1000)
    shape.add_argument("--out")

    verify = sub.add_parser("verify", help="run a verification suite; exit status 0 iff every check passes")
    verify.add_argument("--suite", choices=["paper-tables", "invariants"], required=True)
    verify.add_argument("--max-n", type=int, default=settings.bvp_max_n)
    verify.add_argument("--tolerance-decades", type=float, default=1.0)
    verify.add_argument("--workers", type=int, default=settings.workers)

    sub.add_parser("serve", help="run the MCP tool server")
    return parser


def _family(args: argparse.Namespace, name: Optional[str] = None) -> ShapeFamily:
    name = name or args.family
    if args.shape_config and name == FamilyTag.REG_BETA.value:
        return load_shape_config(args.shape_config, args.d)
    return family_from_name(name, args.d)


def _spec(args: argparse.Namespace, kind: StudyKind, params: dict, family: ShapeFamily) -> StudySpec:
    return StudySpec(kind=kind, target=args.target, family=family, params=params, d=args.d, b=args.b,
                     n_range=parse_n_range(args.n_range), ref_grid=args.ref_grid,
                     shape_config=args.shape_config, workers=args.workers)


def _report(rows) -> None:
    stalled = detect_stagnation(rows)
    if stalled is not None:
        logger.info(f"Stagnation from n={stalled.start_n} at e_n ~ {stalled.level:.2e}")


def _run(args: argparse.Namespace, settings: Settings) -> int:
    if args.command == "approx":
        spec = _spec(args, StudyKind.APPROX, parse_params(args.fparam), _family(args))
        rows = run_convergence(spec)
        _report(rows)
        write_csv(rows, spec.header(), args.out or sys.stdout)
        return 0

    if args.command == "compare":
        families = [_family(args, name.strip()) for name in args.families.split(",") if name.strip()]
        spec = _spec(args, StudyKind.APPROX, parse_params(args.fparam), families[0])
        results = run_family_comparison(spec, families)
        header = spec.header()
        header["shape.families"] = ",".join(results)
        write_comparison_csv(results, header, args.out or sys.stdout)
        return 0

    if args.command == "bvp":
        spec = _spec(args, StudyKind.BVP, parse_params(args.pparam), _family(args))
        if max(spec.n_range) > settings.bvp_max_n and not args.large:
            logger.error(f"n up to {max(spec.n_range)} exceeds {settings.bvp_max_n}; pass --large to allow it")
            return 2
        rows = run_convergence(spec)
        _report(rows)
        write_csv(rows, spec.header(), args.out or sys.stdout)
        return 0

    if args.command == "shape":
        spec = StudySpec(kind=StudyKind.SHAPE_DUMP, target="shape", family=_family(args), d=args.d, b=args.b,
                         n_range=(args.n,), ell=args.ell, samples=args.samples, shape_config=args.shape_config)
        write_shape_csv(run_shape_dump(spec), spec.header(), args.out or sys.stdout)
        return 0

    if args.command == "verify":
        if args.suite == "invariants":
            checks = verify_invariants(settings.sup_samples)
        elif args.suite == "paper-tables":
            checks = verify_published_tables(args.max_n, args.tolerance_decades, settings.ref_grid,
                                             workers=args.workers)
        else:
            raise ValueError(f"Unknown suite {args.suite}")
        for check in checks:
            print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")
        return 0 if all(check.passed for check in checks) else 1

    raise ValueError(f"Unhandled command {args.command}")


def main(argv: Optional[Sequence[str]] = None, serve: Optional[Callable[[], None]] = None,
         settings: Optional[Settings] = None) -> int:
    settings = settings or Settings.from_env()
    args = build_parser(settings).parse_args(list(argv) if argv is not None else None)

    if args.command == "serve":
        if serve is None:
            logger.error("No MCP server is attached to this entry point")
            return 1
        serve()
        return 0

    try:
        return _run(args, settings)
    except FcGramError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    except ValueError as e:
        logger.error(f"Invalid arguments for {args.command}: {e}")
        return 2
