"""The ``phasegate`` command line tool.

Version Added:
    1.0
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Optional, Sequence

from phasegate import get_version_string
from phasegate.cli.config import load_config
from phasegate.cli.errors import ConfigError
from phasegate.cli.experiments import (format_estimate,
                                       run_crosscheck,
                                       run_eigenstates,
                                       run_estimate,
                                       run_optimize,
                                       run_sweep)
from phasegate.errors import PhasegateError


logger = logging.getLogger(__name__)


#: Exit code for success.
EXIT_SUCCESS = 0

#: Exit code for an invalid configuration or command line.
EXIT_CONFIG_ERROR = 2

#: Exit code for an aborted numerical run.
EXIT_NUMERICAL_ERROR = 3


def _cmd_optimize(options: argparse.Namespace) -> None:
    config = load_config(options.config)
    result = run_optimize(config, output_dir=options.out,
                          resume=options.resume)

    report = result.report

    print('F = %.10f  chi/pi = %.6f  F00 = %.6f  (%s)'
          % (report.gate_fidelity, report.chi / math.pi, report.f00,
             result.output_dir))


def _cmd_sweep(options: argparse.Namespace) -> None:
    config = load_config(options.config)
    result = run_sweep(config, workers=options.workers,
                       output_dir=options.out)

    print('%d of %d sweep points succeeded'
          % (len(result.rows), len(result.points)))


def _cmd_crosscheck(options: argparse.Namespace) -> None:
    if not options.pulse:
        raise ConfigError('crosscheck requires --pulse.')

    config = load_config(options.config)
    result = run_crosscheck(config, options.pulse)

    print('F_reduced = %.12f\nF_full = %.12f\ndelta = %.3e'
          % (result.f_reduced, result.f_full, result.delta))


def _cmd_eigenstates(options: argparse.Namespace) -> None:
    config = load_config(options.config)
    states = run_eigenstates(config,
                             count=options.count,
                             output_dir=options.out,
                             check_convergence=options.check_convergence)

    print('%d eigenstates, E_0 = %r hartree' % (len(states),
                                                 states[0].energy))


def _cmd_estimate(options: argparse.Namespace) -> None:
    config = load_config(options.config)

    print(format_estimate(run_estimate(config)))


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser.

    Returns:
        argparse.ArgumentParser:
        The parser.
    """
    parser = argparse.ArgumentParser(
        prog='phasegate',
        description='Optimize and analyze two-atom phasegate pulses.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + get_version_string())

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='log debug output')
    verbosity.add_argument('-q', '--quiet', action='store_true',
                           help='only log warnings and errors')

    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    commands = [
        ('optimize', _cmd_optimize, 'run a single optimization'),
        ('sweep', _cmd_sweep, 'run a gate time or C3 sweep'),
        ('crosscheck', _cmd_crosscheck,
         'compare a pulse under the reduced and full models'),
        ('eigenstates', _cmd_eigenstates, 'export trap eigenstates'),
        ('estimate', _cmd_estimate, 'print speed-limit timescales'),
    ]

    for name, func, help_text in commands:
        subparser = subparsers.add_parser(name, help=help_text)
        subparser.set_defaults(func=func)
        subparser.add_argument('config', help='the experiment YAML file')
        subparser.add_argument('--out', metavar='DIR',
                               help='override the output directory')

        if name == 'optimize':
            subparser.add_argument('--resume', metavar='PULSE',
                                   help='continue from a saved pulse')
        elif name == 'sweep':
            subparser.add_argument('--workers', metavar='N', type=int,
                                   help='the number of worker processes')
        elif name == 'crosscheck':
            subparser.add_argument('--pulse', metavar='FILE',
                                   help='the pulse to check')
        elif name == 'eigenstates':
            subparser.add_argument('--count', metavar='N', type=int,
                                   help='the number of eigenstates')
            subparser.add_argument('--check-convergence',
                                   action='store_true',
                                   help='compare against a doubled grid')

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line tool.

    Args:
        argv (list of str, optional):
            The arguments. Defaults to ``sys.argv[1:]``.

    Returns:
        int:
        The exit code.
    """
    parser = build_parser()

    try:
        options = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_SUCCESS if e.code == 0 else EXIT_CONFIG_ERROR

    if options.verbose:
        level = logging.DEBUG
    elif options.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO

    logging.basicConfig(level=level,
                        format='%(asctime)s %(levelname)s %(name)s: '
                               '%(message)s')

    try:
        options.func(options)
    except ConfigError as e:
        logger.error('Configuration error: %s', e)

        return EXIT_CONFIG_ERROR
    except PhasegateError as e:
        logger.error('Aborted: %s', e)

        return EXIT_NUMERICAL_ERROR

    return EXIT_SUCCESS


if __name__ == '__main__':
    sys.exit(main())
