#!/usr/bin/env python

#
# This file is part of the `lrshield` Python module
#
# Copyright 2025
# LRShield Team
#
# File author(s): LRShield Team (lrshield@users.noreply.github.com)
#
# Distributed under the GPLv3 license
# See the file `LICENSE` or read a copy at
# https://www.gnu.org/licenses/gpl-3.0.txt
#

"""
The `lrshield` command.
"""

from __future__ import annotations

from collections.abc import Sequence
import os
import sys
import argparse

from .. import _log, _misc
from .._config import diagnostics, load_config
from .._errors import ConfigError
from ._stages import COMMANDS, Run

__all__ = [
    'build_parser',
    'main',
    'validate',
]

_HELP = {
    'synth-data': 'Generate synthetic zonal loads and map them to buses.',
    'ingest': 'Read PJM metered load CSVs and map them to buses.',
    'features': 'Build the predictor feature and target matrices.',
    'train-predictor': 'Train one SVR per load and predict every hour.',
    'gen-attacks': 'Generate random, cost and overflow attacks.',
    'train-detector': 'Train the SVM attack detector.',
    'evaluate': 'Detection rates, hyperparameter sweep and error tables.',
    'mitigate': 'Re-dispatch on predicted loads for optimized attacks.',
    'report': 'Collect the evaluation tables into a report.',
    'all': 'Run every stage in order.',
    'validate': 'Check the configuration and list its problems.',
}


def build_parser() -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(
        prog = 'lrshield',
        description = (
            'Load redistribution attack synthesis, detection '
            'and mitigation on DC power system models.'
        ),
    )
    common = argparse.ArgumentParser(add_help = False)
    common.add_argument(
        '--config',
        default = None,
        help = 'Configuration file: TOML, YAML or JSON.',
    )
    common.add_argument(
        '--seed',
        type = int,
        default = None,
        help = 'Master seed (overrides the configuration).',
    )
    common.add_argument(
        '--jobs',
        type = int,
        default = None,
        help = 'Worker processes (overrides the configuration).',
    )
    common.add_argument(
        '--out-dir',
        default = None,
        help = 'Output directory (overrides the configuration).',
    )
    common.add_argument(
        '--no-cache',
        action = 'store_true',
        default = False,
        help = 'Run stages even if their artifacts are up to date.',
    )
    common.add_argument(
        '-v', '--verbose',
        action = 'store_true',
        default = False,
        help = 'Log debug messages.',
    )
    sub = parser.add_subparsers(dest = 'command', metavar = 'COMMAND')
    sub.required = True

    for command in COMMANDS:

        sub.add_parser(command, parents = [common], help = _HELP[command])

    return parser


def _overrides(args: argparse.Namespace) -> dict:

    overrides = {}

    if args.seed is not None:

        overrides['seed'] = args.seed

    if args.jobs is not None:

        overrides['run'] = {'jobs': args.jobs}

    if args.no_cache:

        overrides.setdefault('run', {})['cache'] = False

    if args.out_dir is not None:

        overrides['paths'] = {'out_dir': args.out_dir}

    return overrides


def _error(command: str, e: Exception) -> None:

    sys.stderr.write(_misc.dumps({
        'error': type(e).__name__,
        'message': str(e),
        'key': getattr(e, 'key', None),
        'command': command,
    }))
    sys.stderr.write('\n')


def validate(config_path: str | None, overrides: dict) -> int:
    """
    Print the diagnostics of a configuration as JSON.

    Returns:
        0 if there is nothing to report, 1 for warnings only, 2 if there
        is an error.
    """

    config = load_config(config_path, overrides, validate = False)
    found = diagnostics(config)
    sys.stdout.write(_misc.dumps(
        {'diagnostics': found, 'config_hash': config.hash},
        indent = 2,
    ))
    sys.stdout.write('\n')

    if any(d['level'] == 'error' for d in found):

        return 2

    return 1 if found else 0


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run a command.

    Returns:
        Exit status: 0 on success, 2 for configuration errors, 1 for any
        other failure. Failures are reported on stderr as a JSON object.
    """

    args = build_parser().parse_args(argv)

    if args.verbose:

        os.environ['LRSHIELD_LOG'] = 'debug'

    overrides = _overrides(args)

    try:

        if args.command == 'validate':

            return validate(args.config, overrides)

        config = load_config(args.config, overrides)
        outputs = Run(config).execute(args.command)

    except ConfigError as e:

        _error(args.command, e)

        return 2

    except Exception as e:

        _log(f'Command `{args.command}` failed: {e}', level = 0)
        _error(args.command, e)

        return 1

    _log(f'`{args.command}` done, {len(outputs)} artifact(s) in place.')

    return 0