# -*- coding: utf-8 -*-
"""
Command-line entry point.

    python cli.py reproduce-chsh
    python cli.py verify --trials 1000 --dims 3 3 --seed 42 --format json
    python cli.py povm-demo --dims 3 5 --trace 2

Reports go to stdout (or --out), logs to stderr.
Exit status: 0 all checks passed, 1 a check failed, 2 invalid input.
"""

from typing import List, Optional
import argparse
import logging
import sys
import time

from dotenv import load_dotenv

from numerics_config import Tolerances
from cli_config import (
    DEFAULT_DIMS,
    DEFAULT_EIG_TOL,
    DEFAULT_SEED_TRACE,
    DEFAULT_WORKERS,
    Command,
    OutputFormat,
    RunConfig,
    resolve_log_level,
    resolve_seed,
)
from commands_system import CommandRunner
from report_system import EXIT_INVALID_INPUT, write_output

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--dims', nargs=2, type=int, metavar=('A', 'B'), default=list(DEFAULT_DIMS),
                        help='subsystem dimensions d_A d_B')
    common.add_argument('--trials', type=int, default=None,
                        help='trials per suite unit (per dim, per dim pair, per unitary); '
                             'default keeps each suite\'s own workload')
    common.add_argument('--seed', type=int, default=None,
                        help='master seed (overrides $QBOOLE_SEED)')
    common.add_argument('--tol-rank', type=float, default=None)
    common.add_argument('--tol-eq', type=float, default=None)
    common.add_argument('--tol-ineq', type=float, default=None)
    common.add_argument('--format', choices=[f.value for f in OutputFormat],
                        default=OutputFormat.JSON.value)
    common.add_argument('--out', default=None, help='report path (default stdout)')
    common.add_argument('--workers', type=int, default=DEFAULT_WORKERS,
                        help='threads for trial fan-out; results do not depend on it')
    common.add_argument('--include-timing', action='store_true',
                        help='embed wall-clock duration in the report')
    common.add_argument('--log-level', default=None,
                        help='overrides $QBOOLE_LOG_LEVEL (default WARNING)')
    common.add_argument('--eig-tol', type=float, default=DEFAULT_EIG_TOL,
                        help='tolerance for the rounded CHSH eigenvalues')
    common.add_argument('--trace', type=int, default=DEFAULT_SEED_TRACE,
                        help='coherent seed trace for povm-demo')

    parser = argparse.ArgumentParser(
        prog='qboole',
        description='Quantum Boole, Frechet and CHSH bounds; rank reduction under LOCC.')
    sub = parser.add_subparsers(dest='command', required=True)
    helps = {
        Command.REPRODUCE_CHSH: 'CHSH family, spectrum of M and the rank-two violator',
        Command.REPRODUCE_MEASUREMENT: 'rank-reduction example on a 3x3 state',
        Command.VERIFY: 'randomized invariant suites',
        Command.SEARCH_VIOLATIONS: 'CHSH unitary grid and classical Boole violations',
        Command.POVM_DEMO: 'coherent POVM rank reductions (odd dims)',
    }
    for command, text in helps.items():
        sub.add_parser(command.value, parents=[common], help=text)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    Raises:
        InvalidInputError: an override or the combined configuration is invalid
    """
    overrides = {
        'rank': args.tol_rank,
        'eq': args.tol_eq,
        'ineq': args.tol_ineq,
    }
    tolerances = Tolerances.from_dict({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(
        command=Command(args.command),
        dims=tuple(args.dims),
        trials=args.trials,
        master_seed=resolve_seed(args.seed),
        tolerances=tolerances,
        output_format=OutputFormat(args.format),
        output_path=args.out,
        workers=args.workers,
        include_timing=args.include_timing,
        log_level=resolve_log_level(args.log_level),
        eig_tol=args.eig_tol,
        trace=args.trace,
    )


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    try:
        level = resolve_log_level(args.log_level)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, stream=sys.stderr)

    try:
        config = build_config(args)
        start = time.perf_counter()
        report = CommandRunner(config).run()
        duration = time.perf_counter() - start
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID_INPUT

    logger.info(f"{config.command.value} finished in {duration:.3f}s: "
                f"{report.passed_count}/{len(report.checks)} checks passed")
    if config.include_timing:
        report.duration_seconds = duration
    write_output(report.render(config.output_format), config.output_path, sys.stdout)
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
