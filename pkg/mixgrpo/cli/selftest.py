# -*- coding: utf-8 -*-
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

"""Check the mixing identities on random inputs

Reports the largest deviation from the product-of-experts identity, from
shift invariance, and from gradient gating, and fails if any exceeds the
tolerance.
"""

import logging

from ..errors import NumericalError
from ..mixer import selftest

NAME = 'poe-selftest'

LOGGER = logging.getLogger(__name__)


def add_command_line_arguments(topparser, parents=[]):
    """Add the command-line arguments for this action
    """
    help, desc = __doc__.split('\n', 1)
    parser = topparser.add_parser(NAME, parents=parents,
                                  help=help, description=desc)
    parser._optionals.title = 'Optional arguments'
    arggroup = parser.add_argument_group('Self-test options')
    arggroup.add_argument(
        '--trials', type=int, default=1000,
        help='number of random triples, default: %(default)s')
    arggroup.add_argument(
        '--vocab-size', type=int, default=7,
        help='length of each random distribution, default: %(default)s')
    arggroup.add_argument(
        '--alpha', type=float,
        help='fix the mixing weight, default: draw at random')
    arggroup.add_argument(
        '--tolerance', type=float, default=1e-10,
        help='largest acceptable deviation, default: %(default)s')
    return parser


def run(args, config):
    """Execute the self-test
    """
    deviations = selftest(trials=args.trials, vocab_size=args.vocab_size,
                          seed=config.typed('run', 'seed'), alpha=args.alpha)
    failed = []
    for name, value in deviations.items():
        ok = value <= args.tolerance
        LOGGER.info("%-12s max deviation %.3e [%s]", name, value,
                    'pass' if ok else 'FAIL')
        if not ok:
            failed.append(name)
    if failed:
        raise NumericalError("self-test failed: %s" % ', '.join(failed))
