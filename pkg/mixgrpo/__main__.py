# coding=utf-8
# Copyright (C) the mixgrpo developers (2026)
#
# This file is part of mixgrpo.
#
# mixgrpo is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# mixgrpo is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with mixgrpo.  If not, see <http://www.gnu.org/licenses/>.

"""Train and evaluate policies mixed with a frozen reference.

This utility runs each stage of a mixed-policy GRPO experiment: supervised
training of the reference and base policies, GRPO training under a named
recipe, evaluation, and weight sweeps.

All of the options can be given through the configuration files
(``-c``), or as ``section.key=value`` overrides (``-s``), while any
arguments given explicitly on the command-line take precedence.
"""

import argparse
import logging
import os.path
import sys

from mixgrpo import __version__
from mixgrpo.cli import (ACTIONS, logger)
from mixgrpo.config import RunConfig
from mixgrpo.errors import ConfigError

PROG = ('python -m mixgrpo' if sys.argv[0].endswith('.py')
        else os.path.basename(sys.argv[0]))
LOGGER = logger(name='mixgrpo')

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILURE = 3


# -- parse command-line -------------------------------------------------------

def create_parser():
    """Create a command-line parser for this entry point
    """
    # initialize the argument parser
    parser = argparse.ArgumentParser(
        prog=PROG,
        description=__doc__,
    )

    # optional arguments
    parser._optionals.title = 'Optional arguments'
    parser.add_argument(
        '-V',
        '--version',
        action='version',
        version=__version__,
    )
    sharedopts = argparse.ArgumentParser(add_help=False)
    sharedopts.add_argument(
        '-v',
        '--verbose',
        action='store_true',
        default=False,
        help="print verbose progress to stdout, default: %(default)s",
    )

    # configuration arguments
    confopts = sharedopts.add_argument_group(
        'Configuration options',
        'Files and overrides that define this run',
    )
    confopts.add_argument(
        '-c',
        '--config-file',
        action='append',
        default=[],
        metavar='FILE',
        help='INI configuration file, can be given multiple times',
    )
    confopts.add_argument(
        '-s',
        '--set',
        action='append',
        default=[],
        dest='overrides',
        metavar='SECTION.KEY=VALUE',
        help='override one configuration value, can be given multiple times',
    )
    confopts.add_argument(
        '--seed',
        type=int,
        help='random seed (sets run.seed)',
    )
    confopts.add_argument(
        '-j',
        '--nproc',
        type=int,
        help='number of worker processes (sets run.nproc)',
    )

    # output options
    outopts = sharedopts.add_argument_group(
        'Output options',
        'Configure where run products are written',
    )
    outopts.add_argument(
        '-o',
        '--output-directory',
        default=None,
        help='run directory, default: $MIXGRPO_RUN_ROOT/<label>',
    )
    outopts.add_argument(
        '-l',
        '--label',
        default=None,
        help='run label (sets run.label)',
    )

    # select the stage to run
    subparsers = parser.add_subparsers(
        dest='mode',
        title='Select one of the following stages',
        description='[run {} <stage> --help for detailed help]'.format(PROG),
    )
    for (action, mod) in ACTIONS.items():
        mod.add_command_line_arguments(subparsers, [sharedopts])

    # return the argument parser
    return parser


# -- main code block ----------------------------------------------------------

def main(args=None):
    """Run the mixgrpo command-line interface

    Returns
    -------
    status : `int`
        ``0`` on success, ``2`` for a configuration error, ``3`` for any
        other failure
    """
    parser = create_parser()
    args = parser.parse_args(args=args)
    if args.mode is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG

    # set verbosity level
    LOGGER.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    LOGGER.info(" -- mixgrpo %s -- ", args.mode)

    try:
        LOGGER.info("Loading configuration")
        overrides = list(args.overrides)
        for key, value in (('run.seed', args.seed),
                           ('run.nproc', args.nproc),
                           ('run.label', args.label)):
            if value is not None:
                overrides.append('%s=%s' % (key, value))
        config = RunConfig.from_files(args.config_file, overrides)
        ACTIONS[args.mode].run(args, config)
    except ConfigError as exc:
        LOGGER.critical("Configuration error: %s", exc)
        return EXIT_CONFIG
    except Exception as exc:
        LOGGER.debug("Traceback:", exc_info=True)
        LOGGER.critical("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILURE

    LOGGER.info(" -- Data products written, all done -- ")
    return EXIT_OK


# -- run from command-line ----------------------------------------------------

if __name__ == "__main__":
    sys.exit(main())
