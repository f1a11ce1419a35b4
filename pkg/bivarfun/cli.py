"""
Command line front end: ``bivarfun eval | bench | oracle | gallery``.

Exit codes: 0 on success, 1 on a numerical failure, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import bench, cmx, config, constant
from .core import EvalOptions, fun2m
from .errors import ArgumentError, BivarfunError
from .function_registry import builtin
from .gallery import CASES, GalleryCase


EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


def _boolean(text: str) -> bool:
    value = text.strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise argparse.ArgumentTypeError(f"{text!r} is not a boolean")


def _sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma separated list of sizes")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma separated list of sizes")
    return sizes


def _add_operands(parser: argparse.ArgumentParser):
    parser.add_argument('--f', required=True, choices=builtin.names, metavar='NAME',
                        help=f"function, one of {', '.join(builtin.names)}")
    parser.add_argument('--a', required=True, type=Path, help="cmx file of A")
    parser.add_argument('--b', required=True, type=Path, help="cmx file of B")
    parser.add_argument('--c', required=True, type=Path, help="cmx file of C")
    parser.add_argument('--out', type=Path, help="cmx file of the result (default: stdout)")
    parser.add_argument('--seed', type=int, help="master seed of the random perturbations")
    parser.add_argument('--transpose-b', type=_boolean, default=True, metavar='BOOL',
                        help="B acts as B^T on the right, as in f{A,B}(C) (default: true)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='bivarfun', description="Bivariate matrix functions f{A,B}(C).")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest='command', required=True)

    evaluate = commands.add_parser('eval', help="evaluate f{A,B}(C) with fun2m")
    _add_operands(evaluate)
    evaluate.add_argument('--atom', choices=config.ATOM_METHODS, help="atomic block evaluator")
    evaluate.add_argument('--delta', type=float, help="eigenvalue blocking radius")
    evaluate.add_argument('--delta1', type=float, help="clustering radius of the condition estimate")
    evaluate.add_argument('--nmin', type=int, help="stop splitting at this block size (diag atoms)")
    evaluate.add_argument('--strategy', choices=config.STRATEGIES, help="split strategy")
    evaluate.add_argument('--epsilon', type=float, help="Taylor truncation tolerance")
    evaluate.add_argument('--gamma', type=float, help="merge threshold factor")

    oracle = commands.add_parser('oracle', help="high precision reference value")
    _add_operands(oracle)
    oracle.add_argument('--digits', type=int, default=constant.ORACLE_DIGITS, help="decimal digits")

    run = commands.add_parser('bench', help="run an experiment and write its table as CSV")
    run.add_argument('--experiment', type=int, required=True, choices=sorted(bench.EXPERIMENTS))
    run.add_argument('--sizes', type=_sizes, help="comma separated sizes, e.g. 64,128")
    run.add_argument('--seed', type=int, help="master seed")
    run.add_argument('--out', type=Path, help="CSV file (default: stdout)")

    gallery = commands.add_parser('gallery', help="write the matrices of a test case")
    gallery.add_argument('--case', required=True, choices=CASES)
    gallery.add_argument('--n', required=True, type=int)
    gallery.add_argument('--seed', type=int, default=0)
    gallery.add_argument('--out-a', required=True, type=Path)
    gallery.add_argument('--out-b', required=True, type=Path)
    gallery.add_argument('--out-c', type=Path)
    return parser


def _operands(args):
    A, B, C = cmx.read_cmx(args.a), cmx.read_cmx(args.b), cmx.read_cmx(args.c)
    if not args.transpose_b:
        B = B.T
    return builtin.get_function(args.f), A, B, C


def _emit_matrix(X, out: Optional[Path]):
    if out is None:
        sys.stdout.write(cmx.dumps(X))
    else:
        cmx.write_cmx(out, X)


def _eval(args) -> int:
    f, A, B, C = _operands(args)
    overrides = {'atom_method': args.atom, 'delta': args.delta, 'delta1': args.delta1, 'n_min': args.nmin,
                 'strategy': args.strategy, 'epsilon': args.epsilon, 'gamma': args.gamma, 'seed': args.seed}
    opts = EvalOptions(**{key: value for key, value in overrides.items() if value is not None})
    X, report = fun2m(f, A, B, C, opts)
    _emit_matrix(X, args.out)
    text = json.dumps(report.to_dict(), indent=2)
    print(text, file=sys.stdout if args.out is not None else sys.stderr)
    return EXIT_OK


def _oracle(args) -> int:
    f, A, B, C = _operands(args)
    _emit_matrix(bench.diag_hp_oracle(f, A, B, C, digits=args.digits, seed=args.seed), args.out)
    return EXIT_OK


def _bench(args) -> int:
    experiment = bench.EXPERIMENTS[args.experiment]
    kwargs = {'seed': args.seed}
    if args.sizes is not None:
        kwargs['sizes'] = args.sizes
    rows = experiment(**kwargs)
    if args.out is None:
        bench.write_csv(rows, sys.stdout)
    else:
        with open(args.out, 'w', newline='') as stream:
            bench.write_csv(rows, stream)
    return EXIT_OK


def _gallery(args) -> int:
    case = GalleryCase(args.case, args.n, args.seed)
    A, B = case.generate()
    cmx.write_cmx(args.out_a, A)
    cmx.write_cmx(args.out_b, B)
    if args.out_c is not None:
        cmx.write_cmx(args.out_c, case.rhs())
    return EXIT_OK


COMMANDS = {'eval': _eval, 'oracle': _oracle, 'bench': _bench, 'gallery': _gallery}


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    try:
        return COMMANDS[args.command](args)
    except ArgumentError as exc:
        print(f"bivarfun: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bivarfun: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BivarfunError as exc:
        print(f"bivarfun: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(cli_main())
