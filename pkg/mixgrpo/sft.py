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

"""Supervised next-token training of the reference and base policies
"""

import logging

import numpy

from . import ndgrad
from .errors import (ConfigError, ContractError, InputError)
from .model import get_optimizer

__all__ = ['SftConfig', 'train_sft', 'train_base', 'mean_nll']

LOGGER = logging.getLogger(__name__)


class SftConfig(object):
    """Settings for supervised training

    Parameters
    ----------
    epochs : `int`, optional
        passes over the corpus, may be zero
    batch_size : `int`, optional
        demonstrations per update
    learning_rate : `float`, optional
        optimizer step size
    seed : `int`, optional
        seed for the shuffling order
    optimizer : `str`, optional
        ``'sgd'`` or ``'adam'``
    """
    def __init__(self, epochs=30, batch_size=16, learning_rate=0.5, seed=0,
                 optimizer='sgd'):
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.learning_rate = float(learning_rate)
        self.seed = int(seed)
        self.optimizer = str(optimizer)
        if self.epochs < 0:
            raise ConfigError("sft.epochs must be nonnegative")
        if self.batch_size < 1:
            raise ConfigError("sft.batch_size must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("sft.learning_rate must be positive")

    def as_dict(self):
        return dict(epochs=self.epochs, batch_size=self.batch_size,
                    learning_rate=self.learning_rate, seed=self.seed,
                    optimizer=self.optimizer)


def _examples(policy, pairs):
    """Flatten demonstrations into (context, target) pairs over the
    response tokens only
    """
    contexts = []
    targets = []
    for problem, response in pairs:
        prompt = list(problem.prompt)
        if len(prompt) + len(response) - 1 > policy.max_len:
            raise InputError("demonstration for %r exceeds the maximum "
                             "length %d" % (problem.operands,
                                            policy.max_len))
        for t, token in enumerate(response):
            contexts.append(prompt + list(response[:t]))
            targets.append(token)
    return contexts, targets


def _nll(policy, contexts, targets):
    logp = ndgrad.log_softmax(policy.forward(contexts))
    return ndgrad.neg(ndgrad.mean(ndgrad.pick(logp, targets)))


def mean_nll(policy, corpus, batch_size=512):
    """Mean negative log-likelihood per response token over a corpus
    """
    contexts, targets = _examples(policy, list(corpus))
    total = 0.
    with ndgrad.no_grad():
        for start in range(0, len(contexts), batch_size):
            stop = start + batch_size
            logp = ndgrad.log_softmax(policy.forward(contexts[start:stop]))
            total -= ndgrad.pick(logp, targets[start:stop]).data.sum()
    return float(total / len(contexts))


def _train(init, corpus, cfg, history):
    if not init.trainable:
        raise ContractError("supervised training needs a trainable policy")
    if not len(corpus):
        raise ConfigError("cannot train on an empty corpus")
    policy = init.copy(trainable=True)
    optimizer = get_optimizer(cfg.optimizer, cfg.learning_rate)
    rng = numpy.random.default_rng(cfg.seed)
    pairs = list(corpus)
    _examples(policy, pairs)
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(pairs))
        for start in range(0, len(pairs), cfg.batch_size):
            batch = [pairs[i] for i in order[start:start + cfg.batch_size]]
            loss = _nll(policy, *_examples(policy, batch))
            ndgrad.backward(loss)
            optimizer.step(policy)
        nll = mean_nll(policy, pairs)
        if history is not None:
            history.append(nll)
        LOGGER.info("Epoch %d/%d: mean NLL %.4f", epoch + 1, cfg.epochs, nll)
    return policy


def train_sft(init, corpus, cfg, history=None):
    """Train the reference policy on a demonstration corpus

    The loss is the mean next-token negative log-likelihood of the
    response tokens given the prompt; prompt tokens are not scored.

    Parameters
    ----------
    init : `~mixgrpo.model.Policy`
        trainable starting point; it is copied, not modified
    corpus : `~mixgrpo.tasks.DemoCorpus`
        the demonstrations
    cfg : `SftConfig`
        training settings
    history : `list`, optional
        if given, the mean NLL over the corpus after each epoch is
        appended to it

    Returns
    -------
    reference : `~mixgrpo.model.Policy`
        a frozen policy
    """
    return _train(init, corpus, cfg, history).snapshot()


def train_base(init, corpus, cfg, history=None):
    """Train the base policy on template-free demonstrations

    As `train_sft`, but returns a trainable policy and refuses a corpus
    that uses the answer template.
    """
    if getattr(corpus, 'template', False):
        raise ConfigError("the base policy must be trained on a "
                          "template-free corpus")
    return _train(init, corpus, cfg, history)
