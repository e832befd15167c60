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

"""Train a policy with GRPO under one of the named recipes

Recipes: kl-grpo, grpo-nokl, fixed-mix, prob-mix, adaptive-mix.
"""

import logging
import os.path

from ..adaptive import run_adaptive_grpo
from ..config import run_directory
from ..core import evaluate
from ..errors import ConfigError
from ..io import (MetricsWriter, build_id, load_policy)
from ..mixer import (NONE, MixSpec, MixedPolicy)
from ..rl import run_grpo
from ..tasks import generate_problems

NAME = 'train'
ANCHORS = ('sft', 'base')

LOGGER = logging.getLogger(__name__)


def add_command_line_arguments(topparser, parents=[]):
    """Add the command-line arguments for this action
    """
    help, desc = __doc__.split('\n', 1)
    parser = topparser.add_parser(NAME, parents=parents,
                                  help=help, description=desc)
    parser._optionals.title = 'Optional arguments'
    arggroup = parser.add_argument_group('Training options')
    arggroup.add_argument(
        '-r', '--recipe',
        help='name of the training recipe (sets train.recipe)')
    arggroup.add_argument(
        '-n', '--iterations', type=int,
        help='number of outer iterations (sets grpo.iterations)')
    arggroup.add_argument(
        '--anchor', choices=ANCHORS,
        help='checkpoint used as the frozen reference (sets train.anchor)')
    arggroup.add_argument(
        '--reference', metavar='FILE',
        help='reference checkpoint (sets train.reference)')
    arggroup.add_argument(
        '--base', metavar='FILE',
        help='base checkpoint (sets train.base)')
    return parser


# -- utilities ----------------------------------------------------------------

def checkpoint_path(config, key, outdir):
    """Resolve the ``train.reference`` or ``train.base`` checkpoint

    Raises
    ------
    mixgrpo.errors.ConfigError
        if the checkpoint does not exist
    """
    path = config.typed('train', key)
    if not path:
        path = os.path.join(outdir, 'reference.npz' if key == 'reference'
                            else 'base.npz')
    if not os.path.isfile(path):
        raise ConfigError("train.%s: no checkpoint at %s" % (key, path))
    return path


class EvalHook(object):
    """Evaluate the mixed policy on held-out problems every few iterations

    The mixture is evaluated at the weight the iteration trained with,
    ``record['alpha']``, even when an earlier hook has already moved
    ``mix.alpha`` on to the next iteration's value.
    """
    def __init__(self, problems, every, max_len=6, nproc=1):
        self.problems = problems
        self.every = every
        self.max_len = max_len
        self.nproc = nproc

    def __call__(self, iteration, policy, mix, record):
        if (iteration + 1) % self.every:
            return
        used = MixSpec(mix.scheme, record.get('alpha', mix.alpha),
                       mix.reference)
        report = evaluate(MixedPolicy(policy, used), self.problems,
                          max_len=self.max_len, nproc=self.nproc)
        record['heldout_format_rate'] = report.format_rate
        record['heldout_answer_rate'] = report.answer_rate
        LOGGER.info("Held-out at alpha %.3f: format %.3f, answer %.3f",
                    used.alpha, report.format_rate, report.answer_rate)


class CheckpointHook(object):
    """Write the policy every few iterations
    """
    def __init__(self, directory, every, **metadata):
        self.directory = directory
        self.every = every
        self.metadata = metadata

    def __call__(self, iteration, policy, mix, record):
        if (iteration + 1) % self.every:
            return
        path = os.path.join(self.directory,
                            'iter-%05d.npz' % (iteration + 1))
        policy.write(path, iteration=iteration + 1, alpha=mix.alpha,
                     **self.metadata)


# -- run ----------------------------------------------------------------------

def run(args, config):
    """Execute a GRPO training run
    """
    for key, value in (('train.recipe', args.recipe),
                       ('grpo.iterations', args.iterations),
                       ('train.anchor', args.anchor),
                       ('train.reference', args.reference),
                       ('train.base', args.base)):
        if value is not None:
            config.set_override('%s=%s' % (key, value))
    outdir = run_directory(config, args.output_directory)
    seed = config.typed('run', 'seed')
    recipe = config.recipe()
    anchor = config.typed('train', 'anchor')
    uses_reference = recipe['scheme'] != NONE or recipe['kl_beta'] > 0
    if anchor is not None and not uses_reference:
        raise ConfigError("train.anchor is set but recipe %r uses no "
                          "reference" % config.typed('train', 'recipe'))
    if recipe['adaptive'] and recipe['scheme'] == NONE:
        raise ConfigError("an adaptive recipe needs a mixing scheme")
    anchor = anchor or 'sft'
    if anchor not in ANCHORS:
        raise ConfigError("train.anchor must be one of %s" % ', '.join(
            ANCHORS))

    # load checkpoints
    reference = None
    if uses_reference:
        key = 'reference' if anchor == 'sft' else 'base'
        reference = load_policy(checkpoint_path(config, key, outdir))
    init_key = 'reference' if recipe['init'] == 'sft' else 'base'
    base = load_policy(checkpoint_path(config, init_key, outdir),
                       trainable=True)
    grpo_cfg = config.grpo_config(recipe)
    config.write_resolved(os.path.join(outdir, 'config-%s.ini' % NAME),
                          build=build_id(), seed=seed)

    # prepare data and hooks
    difficulty = config.difficulty()
    data = generate_problems(seed, config.typed('task', 'train_size'),
                             difficulty=difficulty, split='train')
    hooks = []
    every = config.typed('eval', 'eval_every')
    if every:
        heldout = generate_problems(seed, config.typed('eval', 'curve_size'),
                                    difficulty=difficulty, split='test')
        hooks.append(EvalHook(heldout, every,
                              max_len=config.typed('eval', 'max_len'),
                              nproc=grpo_cfg.nproc))
    ckptdir = os.path.join(outdir, 'checkpoints')
    every = config.typed('train', 'checkpoint_every')
    if every:
        hooks.append(CheckpointHook(ckptdir, every, seed=seed))
    metrics = os.path.join(outdir, 'train-metrics.jsonl')
    open(metrics, 'w').close()
    hooks.append(MetricsWriter(metrics))

    # train
    LOGGER.info("Training with recipe %s (%s)",
                config.typed('train', 'recipe'),
                ', '.join('%s=%s' % kv for kv in sorted(recipe.items())))
    if recipe['adaptive']:
        policy, _, state = run_adaptive_grpo(
            base, reference, data, grpo_cfg, config.adaptive_config(),
            hooks=hooks, scheme=recipe['scheme'])
        alpha = state.alpha
    else:
        mix = MixSpec(recipe['scheme'], recipe['alpha'], reference)
        policy, _ = run_grpo(base, mix, data, grpo_cfg, hooks=hooks)
        alpha = mix.alpha
    path = policy.write(os.path.join(ckptdir, 'final.npz'), seed=seed,
                        iteration=grpo_cfg.iterations, alpha=alpha,
                        scheme=recipe['scheme'])
    LOGGER.info("Final policy written to %s", path)
