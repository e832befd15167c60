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

"""Synthetic arithmetic tasks with a verifiable reward

A problem is a two-operand integer expression, e.g.
``<bos> 1 2 + 7 = ?``, and a response is rewarded only if it wraps the
correct answer in the answer template, e.g. ``<ans> 1 9 </ans> <eos>``.
"""

import hashlib
from collections import namedtuple

import numpy

from .errors import (ConfigError, InputError)

__all__ = ['Vocabulary', 'VOCABULARY', 'Difficulty', 'Problem', 'Verdict',
           'DemoCorpus', 'generate_problems', 'verify', 'build_demo_corpus',
           'answer_ignoring_format', 'format_response', 'SPLITS']

# -- vocabulary ---------------------------------------------------------------

SYMBOLS = tuple('0123456789') + (
    '+', '-', '*', '?', '=', '<ans>', '</ans>', '<bos>', '<eos>', '<pad>')


class Vocabulary(object):
    """Bidirectional map between symbols and token ids
    """
    def __init__(self, symbols=SYMBOLS):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ConfigError("vocabulary symbols must be unique")
        self.ids = dict((s, i) for i, s in enumerate(self.symbols))

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, symbol):
        return symbol in self.ids

    def encode(self, symbols):
        """Convert symbols (or a space-separated string) to token ids
        """
        if isinstance(symbols, str):
            symbols = symbols.split()
        try:
            return tuple(self.ids[s] for s in symbols)
        except KeyError as exc:
            raise InputError("unknown symbol %s" % exc)

    def decode(self, tokens):
        """Convert token ids to a space-separated string
        """
        try:
            return ' '.join(self.symbols[int(t)] for t in tokens)
        except (IndexError, ValueError, TypeError):
            raise InputError("token id outside vocabulary of size %d"
                             % len(self))


VOCABULARY = Vocabulary()
DIGITS = frozenset(range(10))
PLUS, MINUS, TIMES, QUERY, EQUALS = VOCABULARY.encode('+ - * ? =')
ANS_OPEN, ANS_CLOSE, BOS, EOS, PAD = VOCABULARY.encode(
    '<ans> </ans> <bos> <eos> <pad>')
VOCAB_SIZE = len(VOCABULARY)

OPERATORS = {
    '+': lambda a, b: a + b,
    '-': lambda a, b: a - b,
    '*': lambda a, b: a * b,
}

SPLITS = ('train', 'validation', 'test')


def _digits(value):
    return tuple(int(c) for c in str(int(value)))


# -- problems -----------------------------------------------------------------

Problem = namedtuple('Problem', ('prompt', 'gold_answer', 'operands',
                                 'operator', 'split'))

Verdict = namedtuple('Verdict', ('format_ok', 'answer_ok', 'reward'))


class Difficulty(object):
    """The space of problems to draw from

    Parameters
    ----------
    min_operand : `int`, optional
        smallest operand, default: ``0``
    max_operand : `int`, optional
        largest operand, default: ``19``
    operators : `str`, optional
        the operators to use, any of ``'+-*'``, default: ``'+'``
    fractions : `tuple` of `float`, optional
        the share of operand tuples assigned to the train, validation and
        test splits, default: ``(0.8, 0.1, 0.1)``
    """
    def __init__(self, min_operand=0, max_operand=19, operators='+',
                 fractions=(0.8, 0.1, 0.1)):
        self.min_operand = int(min_operand)
        self.max_operand = int(max_operand)
        self.operators = ''.join(operators)
        self.fractions = tuple(float(f) for f in fractions)
        if self.min_operand < 0:
            raise ConfigError("operands must be nonnegative")
        if self.min_operand > self.max_operand:
            raise ConfigError("empty operand range [%d, %d]"
                              % (self.min_operand, self.max_operand))
        if not self.operators:
            raise ConfigError("no operators given")
        for op in self.operators:
            if op not in OPERATORS:
                raise ConfigError("unknown operator %r" % op)
        if (len(self.fractions) != len(SPLITS) or
                min(self.fractions) < 0 or
                abs(sum(self.fractions) - 1.) > 1e-9):
            raise ConfigError("split fractions must be three nonnegative "
                              "values summing to 1")

    def __repr__(self):
        return '<Difficulty([{0}, {1}], {2!r})>'.format(
            self.min_operand, self.max_operand, self.operators)

    def tuples(self):
        """Every ``(a, op, b)`` in this space, in a fixed order

        Subtraction is restricted to ``a >= b``.
        """
        rng = range(self.min_operand, self.max_operand + 1)
        for op in self.operators:
            for a in rng:
                for b in rng:
                    if op == '-' and a < b:
                        continue
                    yield (a, op, b)

    def split_of(self, key):
        """Name the split an operand tuple belongs to

        The assignment hashes the tuple, so it is independent of seed and
        of the rest of the space.
        """
        digest = hashlib.sha256(repr(tuple(key)).encode()).hexdigest()
        u = int(digest[:12], 16) / float(16 ** 12)
        edge = 0.
        for name, fraction in zip(SPLITS, self.fractions):
            edge += fraction
            if u < edge:
                return name
        return SPLITS[-1]


def make_problem(a, op, b, split=None):
    """Build the `Problem` for ``a op b``
    """
    prompt = ((BOS,) + _digits(a) + VOCABULARY.encode(op) + _digits(b) +
              (EQUALS, QUERY))
    return Problem(prompt, OPERATORS[op](a, b), (a, b), op, split)


def generate_problems(seed, count, difficulty=None, split='train'):
    """Draw problems from one split of the problem space

    Parameters
    ----------
    seed : `int`
        seed for the random draw
    count : `int`
        number of problems to draw (with replacement)
    difficulty : `Difficulty`, optional
        the problem space, default: ``Difficulty()``
    split : `str`, optional
        one of ``'train'``, ``'validation'``, ``'test'``, or `None` to
        draw from the whole space

    Returns
    -------
    problems : `list` of `Problem`

    Raises
    ------
    mixgrpo.errors.ConfigError
        if the requested split of the space is empty
    """
    if count < 1:
        raise ConfigError("count must be positive, got %r" % count)
    if difficulty is None:
        difficulty = Difficulty()
    if split is not None and split not in SPLITS:
        raise ConfigError("unknown split %r, choose one of: %s"
                          % (split, ', '.join(SPLITS)))
    pool = []
    for key in difficulty.tuples():
        name = difficulty.split_of(key)
        if split is None or name == split:
            pool.append((key, name))
    if not pool:
        raise ConfigError("no problems in the %r split of %r"
                          % (split, difficulty))
    rng = numpy.random.default_rng(seed)
    return [make_problem(*pool[i][0], split=pool[i][1])
            for i in rng.integers(len(pool), size=int(count))]


# -- verification -------------------------------------------------------------

def _body(response):
    """Tokens before the first EOS, or `None` if there is no EOS
    """
    try:
        tokens = [int(t) for t in response]
    except (TypeError, ValueError):
        return None
    if EOS not in tokens:
        return None
    return tokens[:tokens.index(EOS)]


def verify(problem, response):
    """Score a response to a problem

    A response is format-correct when, before its first ``<eos>``, it
    holds exactly one ``<ans>`` and one ``</ans>``, in that order, with a
    nonempty run of digits between them. It is answer-correct when it is
    format-correct and those digits spell the gold answer.

    This function never raises.

    Returns
    -------
    verdict : `Verdict`
    """
    body = _body(response)
    if (body is None or body.count(ANS_OPEN) != 1 or
            body.count(ANS_CLOSE) != 1):
        return Verdict(False, False, 0)
    start = body.index(ANS_OPEN)
    end = body.index(ANS_CLOSE)
    span = body[start + 1:end]
    if end < start or not span or not all(t in DIGITS for t in span):
        return Verdict(False, False, 0)
    answer_ok = int(''.join(map(str, span))) == problem.gold_answer
    return Verdict(True, answer_ok, int(answer_ok))


def answer_ignoring_format(problem, response):
    """Whether the last run of digits before ``<eos>`` is the gold answer

    Diagnostic only: the answer template is not required.
    """
    body = _body(response)
    last = []
    run = []
    for token in body or ():
        if token in DIGITS:
            run.append(token)
        else:
            last, run = (run or last), []
    last = run or last
    if not last:
        return False
    return int(''.join(map(str, last))) == problem.gold_answer


def format_response(answer, template=True):
    """The demonstration response for an integer answer
    """
    digits = _digits(answer)
    if template:
        return (ANS_OPEN,) + digits + (ANS_CLOSE, EOS)
    return digits + (EOS,)


# -- demonstrations -----------------------------------------------------------

class DemoCorpus(object):
    """Prompts paired with demonstration responses

    Parameters
    ----------
    pairs : `list` of `tuple`
        ``(problem, response)`` pairs
    corruption_rate : `float`, optional
        the nominal fraction of demonstrations with a perturbed answer
    template : `bool`, optional
        whether the demonstrations use the answer template
    corrupted : `iterable` of `int`, optional
        indices of the corrupted demonstrations
    """
    def __init__(self, pairs, corruption_rate=0., template=True,
                 corrupted=()):
        self.pairs = [(p, tuple(r)) for p, r in pairs]
        self.corruption_rate = float(corruption_rate)
        self.template = bool(template)
        self.corrupted = frozenset(corrupted)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, index):
        return self.pairs[index]

    def __repr__(self):
        return '<DemoCorpus({0} pairs, corruption_rate={1}, {2})>'.format(
            len(self), self.corruption_rate,
            'templated' if self.template else 'template-free')

    @property
    def problems(self):
        return [p for p, _ in self.pairs]


def build_demo_corpus(seed, count, corruption_rate, difficulty=None,
                      template=True, split='train'):
    """Build a corpus of demonstrations, some with a wrong answer

    Parameters
    ----------
    seed : `int`
        seed for the problem draw and for the choice of corrupted items
    count : `int`
        number of demonstrations
    corruption_rate : `float`
        fraction in ``[0, 1]`` of demonstrations whose last answer digit
        is perturbed; the format is left intact
    difficulty : `Difficulty`, optional
        the problem space
    template : `bool`, optional
        if `False`, demonstrations omit the answer template
    split : `str`, optional
        the problem split to draw from

    Returns
    -------
    corpus : `DemoCorpus`
    """
    corruption_rate = float(corruption_rate)
    if not 0. <= corruption_rate <= 1.:
        raise ConfigError("corruption_rate must lie in [0, 1], got %r"
                          % corruption_rate)
    problems = generate_problems(seed, count, difficulty=difficulty,
                                 split=split)
    rng = numpy.random.default_rng([seed, 1])
    ncorrupt = int(round(corruption_rate * len(problems)))
    corrupted = set(int(i) for i in
                    rng.choice(len(problems), size=ncorrupt, replace=False))
    pairs = []
    for i, problem in enumerate(problems):
        digits = list(_digits(problem.gold_answer))
        if i in corrupted:
            digits[-1] = (digits[-1] + int(rng.integers(1, 10))) % 10
        answer = int(''.join(map(str, digits)))
        pairs.append((problem, format_response(answer, template=template)))
    return DemoCorpus(pairs, corruption_rate=corruption_rate,
                      template=template, corrupted=corrupted)
