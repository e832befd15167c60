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

"""Input/output for checkpoints, metrics streams, and problem sets
"""

import io
import json
import logging
import os
import subprocess
import zipfile

import numpy
from numpy.lib import format as npformat

from . import ndgrad
from .errors import InputError
from .model import (Policy, PolicyParams)
from .tasks import (SPLITS, VOCABULARY, OPERATORS, DemoCorpus, make_problem)

__all__ = ['FORMAT', 'save_policy', 'load_policy', 'MetricsWriter',
           'read_metrics', 'write_problems', 'read_problems', 'write_corpus',
           'read_corpus', 'build_id', 'METRICS_SCHEMA']

LOGGER = logging.getLogger(__name__)

FORMAT = 'mixgrpo-policy-1'
METRICS_SCHEMA = 1
PARAM_PREFIX = 'param/'

# zip members are stamped with a fixed date so that equal policies give
# byte-identical checkpoints
ZIP_DATE = (1980, 1, 1, 0, 0, 0)


# -- checkpoints --------------------------------------------------------------

def _write_member(archive, name, array):
    buffer = io.BytesIO()
    npformat.write_array(buffer, numpy.asanyarray(array),
                         allow_pickle=False)
    info = zipfile.ZipInfo(name + '.npy', date_time=ZIP_DATE)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    archive.writestr(info, buffer.getvalue())


def save_policy(policy, path, **metadata):
    """Write a policy to a ``.npz`` checkpoint

    Parameters
    ----------
    policy : `~mixgrpo.model.Policy`
        the policy to write
    path : `str`
        target file path; parent directories are created
    **metadata
        other JSON-serialisable values to store, e.g. ``seed=1``

    Returns
    -------
    path : `str`
        the path that was written
    """
    params = policy.params
    head = os.path.dirname(path)
    if head and not os.path.isdir(head):
        os.makedirs(head)
    with zipfile.ZipFile(path, 'w') as archive:
        _write_member(archive, 'format', numpy.array(FORMAT))
        for key in ('vocab_size', 'width', 'max_len'):
            _write_member(archive, key, numpy.array(getattr(params, key)))
        _write_member(archive, 'metadata',
                      numpy.array(json.dumps(metadata, sort_keys=True)))
        for name, tensor in params.items():
            _write_member(archive, PARAM_PREFIX + name, tensor.data)
    LOGGER.debug("Policy written to %s", path)
    return path


def load_policy(path, trainable=False):
    """Read a policy from a ``.npz`` checkpoint

    Returns
    -------
    policy : `~mixgrpo.model.Policy`
        frozen unless ``trainable=True``

    Raises
    ------
    mixgrpo.errors.InputError
        if the file is not a policy checkpoint
    """
    if not os.path.isfile(path):
        raise InputError("no checkpoint at %s" % path)
    with numpy.load(path, allow_pickle=False) as archive:
        if 'format' not in archive.files or \
                str(archive['format']) != FORMAT:
            raise InputError("%s is not a %s checkpoint" % (path, FORMAT))
        sizes = [int(archive[key]) for key in
                 ('vocab_size', 'width', 'max_len')]
        tensors = [(name[len(PARAM_PREFIX):],
                    ndgrad.Tensor(archive[name].astype(ndgrad.DTYPE)))
                   for name in archive.files if name.startswith(PARAM_PREFIX)]
    return Policy(PolicyParams(*sizes, tensors=tensors), trainable=trainable)


def read_metadata(path):
    """Read the metadata dict stored with a checkpoint
    """
    with numpy.load(path, allow_pickle=False) as archive:
        return json.loads(str(archive['metadata']))


# -- metrics ------------------------------------------------------------------

class MetricsWriter(object):
    """Append JSON records, one per line, to a metrics stream

    Instances can be passed as hooks to `~mixgrpo.rl.run_grpo`.

    Parameters
    ----------
    path : `str`
        the file to append to; created (empty) if needed
    """
    def __init__(self, path):
        self.path = path
        head = os.path.dirname(path)
        if head and not os.path.isdir(head):
            os.makedirs(head)
        open(path, 'a').close()

    def write(self, record):
        record = dict(record)
        record.setdefault('schema', METRICS_SCHEMA)
        with open(self.path, 'a') as fobj:
            fobj.write(json.dumps(record, sort_keys=True) + '\n')

    def __call__(self, iteration, policy, mix, record):
        self.write(record)


def read_metrics(path):
    """Read every record from a metrics stream
    """
    with open(path) as fobj:
        return [json.loads(line) for line in fobj if line.strip()]


# -- problems -----------------------------------------------------------------

def _parse_prompt(prompt):
    symbols = prompt.split()
    ops = [i for i, s in enumerate(symbols) if s in OPERATORS]
    if (len(ops) != 1 or symbols[:1] != ['<bos>'] or
            symbols[-2:] != ['=', '?']):
        raise InputError("cannot parse prompt %r" % prompt)
    i = ops[0]
    try:
        a = int(''.join(symbols[1:i]))
        b = int(''.join(symbols[i + 1:-2]))
    except ValueError:
        raise InputError("cannot parse prompt %r" % prompt)
    return a, symbols[i], b


def write_problems(path, problems):
    """Write problems as ``prompt<TAB>gold<TAB>split`` lines

    A problem drawn from no particular split is written with split ``-``.
    """
    with open(path, 'w') as fobj:
        for problem in problems:
            fobj.write('%s\t%d\t%s\n' % (VOCABULARY.decode(problem.prompt),
                                         problem.gold_answer,
                                         problem.split or '-'))
    return path


def read_problems(path):
    """Read problems written by `write_problems`

    Two-column files, without the split, are also accepted.
    """
    problems = []
    with open(path) as fobj:
        for line in fobj:
            if not line.strip():
                continue
            fields = line.rstrip('\n').split('\t')
            if len(fields) == 2:
                fields.append('-')
            try:
                prompt, gold, split = fields
            except ValueError:
                raise InputError("cannot parse problem line %r" % line)
            if split != '-' and split not in SPLITS:
                raise InputError("unknown split %r" % split)
            problem = make_problem(*_parse_prompt(prompt),
                                   split=None if split == '-' else split)
            if problem.gold_answer != int(gold):
                raise InputError("gold answer %s does not match %r"
                                 % (gold, prompt))
            problems.append(problem)
    return problems


def write_corpus(path, corpus):
    """Write a demonstration corpus as ``prompt<TAB>gold<TAB>response``
    lines, preceded by a comment header
    """
    with open(path, 'w') as fobj:
        fobj.write('# corruption_rate=%r template=%d corrupted=%s\n' % (
            corpus.corruption_rate, corpus.template,
            ','.join(map(str, sorted(corpus.corrupted)))))
        for problem, response in corpus:
            fobj.write('%s\t%d\t%s\n' % (VOCABULARY.decode(problem.prompt),
                                         problem.gold_answer,
                                         VOCABULARY.decode(response)))
    return path


def read_corpus(path):
    """Read a corpus written by `write_corpus`
    """
    pairs = []
    header = {}
    with open(path) as fobj:
        for line in fobj:
            if line.startswith('#'):
                header = dict(item.split('=', 1) for item in
                              line[1:].split())
                continue
            if not line.strip():
                continue
            prompt, _, response = line.rstrip('\n').split('\t')
            pairs.append((make_problem(*_parse_prompt(prompt)),
                          VOCABULARY.encode(response)))
    corrupted = [int(i) for i in header.get('corrupted', '').split(',') if i]
    return DemoCorpus(pairs,
                      corruption_rate=float(header.get('corruption_rate', 0)),
                      template=bool(int(header.get('template', 1))),
                      corrupted=corrupted)


# -- provenance ---------------------------------------------------------------

def build_id():
    """Identify the code that produced a run

    Returns the output of ``git describe --always --dirty`` for the
    package source tree, or the package version outside a git checkout.
    """
    from . import __version__
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.check_output(
            ['git', 'describe', '--always', '--dirty'], cwd=here,
            stderr=subprocess.DEVNULL)
    except (OSError, subprocess.CalledProcessError):
        return __version__
    return out.decode().strip() or __version__
