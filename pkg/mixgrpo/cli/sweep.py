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

"""Sweep the mixing weight for each mixing scheme

Evaluates a policy mixed with the reference over a grid of weights and
writes one row per (scheme, weight).
"""

import logging
import os.path

import numpy

from ..config import run_directory
from ..core import (alpha_sweep, write_table)
from ..errors import ConfigError
from ..io import (build_id, load_policy)
from ..tasks import generate_problems
from .train import checkpoint_path

NAME = 'sweep'

LOGGER = logging.getLogger(__name__)


def add_command_line_arguments(topparser, parents=[]):
    """Add the command-line arguments for this action
    """
    help, desc = __doc__.split('\n', 1)
    parser = topparser.add_parser(NAME, parents=parents,
                                  help=help, description=desc)
    parser._optionals.title = 'Optional arguments'
    arggroup = parser.add_argument_group('Sweep options')
    arggroup.add_argument(
        '-p', '--policy', metavar='FILE',
        help='checkpoint of the policy to mix, default: the base policy')
    arggroup.add_argument(
        '--reference', metavar='FILE',
        help='reference checkpoint (sets train.reference)')
    arggroup.add_argument(
        '--alphas', help='weights to evaluate (sets eval.alphas)')
    arggroup.add_argument(
        '--schemes', help='mixing schemes to compare (sets eval.schemes)')
    return parser


def run(args, config):
    """Execute the sweep
    """
    for key, value in (('train.reference', args.reference),
                       ('eval.alphas', args.alphas),
                       ('eval.schemes', args.schemes)):
        if value is not None:
            config.set_override('%s=%s' % (key, value))
    outdir = run_directory(config, args.output_directory)
    path = args.policy or checkpoint_path(config, 'base', outdir)
    if not os.path.isfile(path):
        raise ConfigError("no checkpoint at %s" % path)
    policy = load_policy(path)
    reference = load_policy(checkpoint_path(config, 'reference', outdir))
    config.write_resolved(os.path.join(outdir, 'config-%s.ini' % NAME),
                          build=build_id(), seed=config.typed('run', 'seed'))

    problems = generate_problems(config.typed('run', 'seed'),
                                 config.typed('eval', 'heldout_size'),
                                 difficulty=config.difficulty(),
                                 split='test')
    table = alpha_sweep(policy, reference, problems,
                        schemes=config.typed('eval', 'schemes'),
                        alphas=config.typed('eval', 'alphas'),
                        max_len=config.typed('eval', 'max_len'),
                        nproc=config.typed('run', 'nproc'))
    target = write_table(table, os.path.join(outdir, 'sweep.csv'))

    for scheme in numpy.unique(table['scheme']):
        rows = table[table['scheme'] == scheme]
        best = rows[int(numpy.argmax(rows['answer_rate']))]
        LOGGER.info("%s: best answer rate %.3f at alpha=%.1f", scheme,
                    best['answer_rate'], best['alpha'])
    LOGGER.info("Sweep written to %s", target)
