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

"""Tests for :mod:`mixgrpo.tasks`
"""

from collections import defaultdict

import pytest
from hypothesis import (given, strategies as st)

from mixgrpo import tasks
from mixgrpo.errors import (ConfigError, InputError)

V = tasks.VOCABULARY


def _problem(a=2, op='+', b=2):
    return tasks.make_problem(a, op, b)


# -- vocabulary ---------------------------------------------------------------

def test_vocabulary_ids():
    assert tasks.VOCAB_SIZE == 20
    assert V.encode('0 9') == (0, 9)
    assert (tasks.PLUS, tasks.MINUS, tasks.TIMES, tasks.QUERY,
            tasks.EQUALS) == (10, 11, 12, 13, 14)
    assert (tasks.ANS_OPEN, tasks.ANS_CLOSE, tasks.BOS, tasks.EOS,
            tasks.PAD) == (15, 16, 17, 18, 19)


def test_vocabulary_decode():
    assert V.decode((17, 1, 2, 10, 7, 14, 13)) == '<bos> 1 2 + 7 = ?'
    with pytest.raises(InputError):
        V.decode([20])
    with pytest.raises(InputError):
        V.encode('1 + x')
    with pytest.raises(ConfigError):
        tasks.Vocabulary(['a', 'a'])


# -- problems -----------------------------------------------------------------

def test_make_problem():
    problem = tasks.make_problem(12, '+', 7)
    assert V.decode(problem.prompt) == '<bos> 1 2 + 7 = ?'
    assert problem.gold_answer == 19
    assert tasks.make_problem(3, '*', 4).gold_answer == 12


def test_generate_problems_deterministic():
    assert tasks.generate_problems(4, 50) == tasks.generate_problems(4, 50)
    assert tasks.generate_problems(4, 50) != tasks.generate_problems(5, 50)


def test_generate_problems_fixed_operands():
    difficulty = tasks.Difficulty(2, 2, '+')
    problems = tasks.generate_problems(0, 5, difficulty=difficulty,
                                       split=None)
    assert [p.gold_answer for p in problems] == [4] * 5


def test_generate_problems_subtraction_nonnegative():
    difficulty = tasks.Difficulty(0, 9, '-')
    for problem in tasks.generate_problems(1, 200, difficulty=difficulty,
                                           split=None):
        a, b = problem.operands
        assert a >= b
        assert problem.gold_answer >= 0


def test_splits_disjoint():
    seen = defaultdict(set)
    for problem in tasks.generate_problems(2, 10000, split=None):
        seen[(problem.operands, problem.operator)].add(problem.split)
    assert all(len(splits) == 1 for splits in seen.values())

    keys = {}
    for split in tasks.SPLITS:
        keys[split] = set((p.operands, p.operator) for p in
                          tasks.generate_problems(3, 3000, split=split))
    assert not keys['train'] & keys['validation']
    assert not keys['train'] & keys['test']
    assert not keys['validation'] & keys['test']


def test_split_assignment_stable():
    small = tasks.Difficulty(0, 5, '+')
    large = tasks.Difficulty(0, 19, '+-')
    for key in small.tuples():
        assert small.split_of(key) == large.split_of(key)


def test_difficulty_errors():
    with pytest.raises(ConfigError):
        tasks.Difficulty(5, 3)
    with pytest.raises(ConfigError):
        tasks.Difficulty(operators='/')
    with pytest.raises(ConfigError):
        tasks.Difficulty(fractions=(.5, .5, .5))
    empty = tasks.Difficulty(fractions=(1., 0., 0.))
    with pytest.raises(ConfigError):
        tasks.generate_problems(0, 1, difficulty=empty, split='test')
    with pytest.raises(ConfigError):
        tasks.generate_problems(0, 0)


# -- verify -------------------------------------------------------------------

def test_verify_correct():
    response = V.encode('<ans> 4 </ans> <eos>')
    assert tasks.verify(_problem(), response) == (True, True, 1)


def test_verify_no_template():
    assert tasks.verify(_problem(), V.encode('4 <eos>')) == (False, False, 0)


def test_verify_wrong_answer():
    response = V.encode('<ans> 5 </ans> <eos>')
    assert tasks.verify(_problem(), response) == (True, False, 0)


@pytest.mark.parametrize('response', [
    '<ans> 4 </ans>',
    '<eos> <ans> 4 </ans> <eos>',
    '<ans> <ans> 4 </ans> <eos>',
    '<ans> 4 </ans> </ans> <eos>',
    '</ans> 4 <ans> <eos>',
    '<ans> </ans> <eos>',
    '<ans> 4 + </ans> <eos>',
    '<eos>',
])
def test_verify_bad_format(response):
    assert tasks.verify(_problem(), V.encode(response)) == (False, False, 0)


def test_verify_ignores_tail():
    response = V.encode('<ans> 1 9 </ans> <eos> <ans> 2 </ans>')
    assert tasks.verify(_problem(12, '+', 7), response).answer_ok


@given(st.lists(st.integers(min_value=-3, max_value=40), max_size=12))
def test_verify_never_raises(response):
    verdict = tasks.verify(_problem(), response)
    assert verdict.reward == int(verdict.format_ok and verdict.answer_ok)
    assert verdict.format_ok or not verdict.answer_ok


def test_verify_garbage():
    assert tasks.verify(_problem(), [None, 'x']) == (False, False, 0)
    assert tasks.verify(_problem(), None) == (False, False, 0)


def test_answer_ignoring_format():
    problem = _problem(12, '+', 7)
    assert tasks.answer_ignoring_format(problem, V.encode('1 9 <eos>'))
    assert tasks.answer_ignoring_format(problem, V.encode('3 + 1 9 <eos>'))
    assert not tasks.answer_ignoring_format(problem, V.encode('1 9'))
    assert not tasks.answer_ignoring_format(problem,
                                            V.encode('1 9 + 3 <eos>'))
    assert not tasks.answer_ignoring_format(problem, V.encode('<eos>'))


def test_format_response():
    assert V.decode(tasks.format_response(19)) == '<ans> 1 9 </ans> <eos>'
    assert V.decode(tasks.format_response(7, template=False)) == '7 <eos>'


# -- demonstrations -----------------------------------------------------------

def test_demo_corpus_clean():
    corpus = tasks.build_demo_corpus(0, 100, 0.)
    assert len(corpus) == 100
    assert not corpus.corrupted
    assert all(tasks.verify(p, r).reward == 1 for p, r in corpus)


def test_demo_corpus_all_corrupted():
    corpus = tasks.build_demo_corpus(0, 100, 1.)
    verdicts = [tasks.verify(p, r) for p, r in corpus]
    assert all(v.format_ok for v in verdicts)
    assert not any(v.answer_ok for v in verdicts)


def test_demo_corpus_rate():
    corpus = tasks.build_demo_corpus(1, 1000, .3)
    wrong = [i for i, (p, r) in enumerate(corpus)
             if not tasks.verify(p, r).answer_ok]
    assert abs(len(wrong) - 300) <= 1
    assert set(wrong) == corpus.corrupted


def test_demo_corpus_template_free():
    corpus = tasks.build_demo_corpus(2, 50, 0., template=False)
    assert not corpus.template
    for problem, response in corpus:
        assert not tasks.verify(problem, response).format_ok
        assert tasks.answer_ignoring_format(problem, response)


def test_demo_corpus_bad_rate():
    with pytest.raises(ConfigError):
        tasks.build_demo_corpus(0, 10, 1.5)
