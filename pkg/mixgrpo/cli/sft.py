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

"""Train the reference (or base) policy on demonstrations

The ``sft`` stage trains the frozen reference on templated
demonstrations, some with a corrupted answer; the ``base`` stage trains
the starting policy on correct demonstrations without the answer
template.
"""

import hashlib
import logging
import os.path

from ..config import run_directory
from ..errors import ConfigError
from ..io import (MetricsWriter, build_id, read_corpus, write_corpus)
from ..model import init_policy
from ..sft import (mean_nll, train_base, train_sft)
from ..tasks import (VOCAB_SIZE, build_demo_corpus)

NAME = 'sft'
STAGES = {
    'sft': 'reference.npz',
    'base': 'base.npz',
}

LOGGER = logging.getLogger(__name__)


def add_command_line_arguments(topparser, parents=[]):
    """Add the command-line arguments for this action
    """
    help, desc = __doc__.split('\n', 1)
    parser = topparser.add_parser(NAME, parents=parents,
                                  help=help, description=desc)
    parser._optionals.title = 'Optional arguments'
    arggroup = parser.add_argument_group('Supervised training options')
    arggroup.add_argument(
        '--stage', choices=sorted(STAGES), default='sft',
        help='which policy to train, default: %(default)s')
    arggroup.add_argument(
        '--corpus', metavar='FILE',
        help='read demonstrations from this file instead of generating '
             'them (sets sft.corpus)')
    return parser


def config_hash(config):
    """SHA-256 digest of the resolved configuration
    """
    digest = hashlib.sha256()
    for section in config.sections():
        for key, value in sorted(config.items(section)):
            digest.update(('%s.%s=%s\n' % (section, key, value)).encode())
    return digest.hexdigest()


def load_corpus(config, stage):
    """Read the configured corpus, or generate one for ``stage``
    """
    path = config.typed('sft', 'corpus')
    if path:
        if not os.path.isfile(path):
            raise ConfigError("sft.corpus: no such file %s" % path)
        return read_corpus(path)
    return build_demo_corpus(
        config.typed('run', 'seed'), config.typed('task', 'corpus_size'),
        config.typed('task', 'corruption_rate') if stage == 'sft' else 0.,
        difficulty=config.difficulty(), template=(stage == 'sft'))


def run(args, config):
    """Execute the supervised training stage
    """
    if args.corpus:
        config.set('sft', 'corpus', args.corpus)
    stage = args.stage
    corpus = load_corpus(config, stage)
    outdir = run_directory(config, args.output_directory)
    seed = config.typed('run', 'seed')
    write_corpus(os.path.join(outdir, 'corpus-%s.txt' % stage), corpus)
    config.write_resolved(os.path.join(outdir, 'config-%s.ini' % NAME),
                          build=build_id(), seed=seed)

    LOGGER.info("Training %s policy on %s", stage, corpus)
    init = init_policy(VOCAB_SIZE, width=config.typed('model', 'width'),
                       max_len=config.typed('model', 'max_len'),
                       depth=config.typed('model', 'depth'), seed=seed)
    history = []
    train = train_sft if stage == 'sft' else train_base
    policy = train(init, corpus, config.sft_config(), history=history)

    digest = config_hash(config)
    path = policy.write(os.path.join(outdir, STAGES[stage]), stage=stage,
                        seed=seed, config_hash=digest)
    nll = mean_nll(policy, corpus)
    MetricsWriter(os.path.join(outdir, 'metrics.jsonl')).write({
        'event': NAME,
        'stage': stage,
        'final_nll': nll,
        'epoch_nll': history,
        'seed': seed,
        'config_hash': digest,
    })
    LOGGER.info("%s policy written to %s (mean NLL %.4f)", stage, path, nll)
