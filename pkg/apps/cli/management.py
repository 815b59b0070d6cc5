"""
Command-line entry point.

    plqeigen solve --config run.json --out results/disk --seed 3
    plqeigen limit --config limit.json --quiet
"""
import argparse
import sys
from pathlib import Path

import structlog

import config as project
from apps.core.exceptions import PlqError

from .config import COMMANDS, parse_config
from .runner import EXIT_OUTPUT, exit_status, run

logger = structlog.get_logger(__name__)

HELP = {
    'solve': 'first nontrivial eigenpair of the coupled system',
    'sweep': 'continuation in p towards the infinity limit',
    'limit': 'closed-form limit value on the disk or the rectangle',
    'oracle': 'closed-form limit value beside the brute-force cone/plane value',
    'residual': 'limit-operator residuals of the cone/plane pair',
    'calibrate': 'scalar Dirichlet and Neumann eigenvalues on the configured grid',
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='RunConfig JSON document')
    common.add_argument('--out', help='output directory (overrides out_dir)')
    common.add_argument('--seed', type=int, help='random seed (overrides seed)')
    common.add_argument(
        '--quiet', action='store_true', help='only log warnings and errors to the console'
    )

    parser = argparse.ArgumentParser(
        prog='plqeigen',
        description='Coupled p/q-Laplacian eigenvalues and their infinity limits.',
    )
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=HELP[command])
    return parser


def load_config(args):
    """
    RunConfig from --config (an empty document without it) with the CLI overrides.

    Raises:
        OSError: the config file cannot be read
        ConfigError: invalid document, or a command that contradicts the CLI
    """
    text = '{}' if args.config is None else args.config.read_text(encoding='utf-8')
    return parse_config(
        text,
        overrides={'command': args.command, 'out_dir': args.out, 'seed': args.seed},
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    project.setup(quiet=args.quiet)
    try:
        config = load_config(args)
    except OSError as exc:
        logger.error("config_unreadable", path=str(args.config), error=str(exc))
        return EXIT_OUTPUT
    except PlqError as exc:
        logger.error("config_rejected", errors=getattr(exc, 'detail', str(exc)))
        return exit_status(exc)
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
