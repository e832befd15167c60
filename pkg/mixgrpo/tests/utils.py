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

"""Utilities for the mixgrpo test suite
"""

import numpy

from mixgrpo.model import init_policy
from mixgrpo.tasks import (EOS, VOCAB_SIZE, format_response)

__all__ = ['constant_policy', 'ScriptedScorer']


def constant_policy(logits, max_len=16, trainable=False):
    """A policy whose logits are ``logits`` at every context
    """
    logits = numpy.asarray(logits, dtype=float)
    policy = init_policy(logits.size, width=2, max_len=max_len, depth=1,
                         zero=True, trainable=trainable)
    # tanh(40) rounds to exactly 1
    policy.params['hidden_0_bias'].data[0] = 40.
    policy.params['output_projection'].data[0] = logits
    return policy


class ScriptedScorer(object):
    """A scorer that answers each known prompt with a fixed response

    Unknown prompts are answered with ``<eos>``.
    """
    def __init__(self, script, max_len=16, vocab_size=VOCAB_SIZE):
        self.script = dict((tuple(p), tuple(r)) for p, r in script.items())
        self.max_len = max_len
        self.vocab_size = vocab_size

    @classmethod
    def solving(cls, problems, correct=None, template=True):
        """Script the gold answer for each problem (where ``correct[i]``)
        """
        script = {}
        for i, problem in enumerate(problems):
            answer = problem.gold_answer
            if correct is not None and not correct[i]:
                answer += 1
            script[problem.prompt] = format_response(answer,
                                                     template=template)
        return cls(script)

    def next_token(self, context):
        context = tuple(context)
        for prompt, response in self.script.items():
            n = len(prompt)
            if context[:n] == prompt and \
                    context[n:] == response[:len(context) - n]:
                if len(context) - n < len(response):
                    return response[len(context) - n]
        return EOS

    def probs(self, contexts):
        out = numpy.full((len(contexts), self.vocab_size), 0.01)
        for row, context in zip(out, contexts):
            row[self.next_token(context)] = 1.
        return out / out.sum(axis=1, keepdims=True)
