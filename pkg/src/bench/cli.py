"""
Gadgetdict Bench - verify, sweep and trace from the command line

Usage:
    python3 -m src.bench verify --n 262144 --ops 1000000 --seed 1
    python3 -m src.bench sweep --lambdas 8,16,32,64 --jobs 4 > sweep.csv
    python3 -m src.bench trace --ops 100 --structure new
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from ..utils.errors import BadParameters, GadgetdictError
from ..utils.logger import print_summary, setup_logger
from .runner import cmd_sweep, cmd_trace, cmd_verify, log_trend_fits, write_csv
from .settings import BenchSettings, load_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_BAD_PARAMS = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON config file (see config.example.json)')
    common.add_argument('--n', type=int, help='n_max, live keys the dictionary must hold')
    common.add_argument('--B', type=int, help='Words per page')
    common.add_argument('--M', type=int, help='Cache size in words')
    common.add_argument('--lambda', dest='lam', type=int, help='Trade-off parameter lambda')
    common.add_argument('--tmin', type=int, help='Base-gadget threshold (default: derived from lambda)')
    common.add_argument('--seed', type=int, help='Run seed')
    common.add_argument('--mix', help='Insert:delete:lookup percentages, e.g. 45:10:45')
    common.add_argument('--ops', type=int, help='Number of operations')
    common.add_argument('--key-dist', choices=['universe2n', 'uniform64'], help='Key distribution')
    common.add_argument('--fanout', type=int, help='Baseline fan-out lambda_b')
    common.add_argument('--structure', choices=['new', 'baseline', 'both'], default='both',
                        help='Structures to run')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Log level')

    parser = argparse.ArgumentParser(prog='python3 -m src.bench', description='Gadgetdict benchmark harness')
    sub = parser.add_subparsers(dest='command', required=True)

    verify = sub.add_parser('verify', parents=[common], help='Lockstep run against the oracle')
    verify.add_argument('--inject-fault', type=int, metavar='OP',
                        help='Corrupt one log page of the dictionary at this op index')
    verify.add_argument('--page-file', help='Save the dictionary to this page file after a pass')

    sweep = sub.add_parser('sweep', parents=[common], help='CSV of costs over a lambda list')
    sweep.add_argument('--lambdas', default='8,16,32,64', help='Comma-separated lambda values')
    sweep.add_argument('--jobs', type=int, default=1, help='Parallel sweep points')

    sub.add_parser('trace', parents=[common], help='Per-op I/O trace')
    return parser


def apply_overrides(settings: BenchSettings, args: argparse.Namespace) -> BenchSettings:
    """CLI flags win over file and environment values"""
    def pick(**flags):
        return {k: v for k, v in flags.items() if v is not None}

    return settings.model_copy(update={
        'memory': settings.memory.model_copy(update=pick(page_words=args.B)),
        'dictionary': settings.dictionary.model_copy(update=pick(
            n_max=args.n, cache_words=args.M, lam=args.lam, t_min=args.tmin)),
        'baseline': settings.baseline.model_copy(update=pick(fanout=args.fanout)),
        'workload': settings.workload.model_copy(update=pick(
            ops=args.ops, mix=args.mix, key_dist=args.key_dist, seed=args.seed)),
        'logging': settings.logging.model_copy(update=pick(level=args.log_level)),
    })


def parse_lambdas(text: str) -> List[int]:
    try:
        lambdas = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise BadParameters(f"--lambdas {text!r} is not a comma-separated list of integers")
    if not lambdas:
        raise BadParameters("--lambdas is empty")
    return lambdas


def run(args: argparse.Namespace) -> int:
    settings = apply_overrides(load_settings(args.config), args)
    setup_logger(level=getattr(logging, settings.logging.level.upper(), logging.INFO))

    if args.command == 'verify':
        report = cmd_verify(settings, args.structure, args.inject_fault, args.page_file)
        stats = {'ops': report.ops, 'lookups': report.lookups, **report.stats}
        if report.disagreement is not None:
            stats['first disagreement'] = report.disagreement.describe()
        print_summary(stats, title='VERIFY PASSED' if report.passed else 'VERIFY FAILED', stream=sys.stderr)
        return EXIT_OK if report.passed else EXIT_DISAGREE

    if args.command == 'sweep':
        rows = cmd_sweep(settings, parse_lambdas(args.lambdas), args.jobs, args.structure)
        write_csv(rows, sys.stdout)
        log_trend_fits(rows)
        return EXIT_OK

    totals = cmd_trace(settings, args.structure, sys.stdout)
    for name, io in totals.items():
        logger.info(f"✓ {name}: {io.reads} reads, {io.writes} writes")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (GadgetdictError, ValidationError) as e:
        logger.error(f"✗ {e}")
        return EXIT_BAD_PARAMS


if __name__ == '__main__':
    sys.exit(main())
