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

"""Adaptive choice of the mixing weight

After every outer iteration both the trainable policy and the mixture are
greedy-decoded on a validation set. Problems the mixture breaks count as
forgetting (``s1``), problems it fixes count as gain (``s2``), and the
weight for the next iteration is ``expit((s2 - s1 - c_o) / c_d)``.
"""

import logging

import numpy
from scipy.special import expit

from .errors import ConfigError
from .mixer import (LOGIT, MixSpec, MixedPolicy)
from .rl import run_grpo
from .tasks import (EOS, generate_problems, verify)

__all__ = ['AdaptiveConfig', 'AdaptiveState', 'AdaptiveScheduler',
           'DecodeCounter', 'PRESETS', 'greedy_decode',
           'greedy_decode_batch', 'count_forgetting_gain', 'update_alpha',
           'run_adaptive_grpo']

LOGGER = logging.getLogger(__name__)

# (c_o, c_d, validation size)
PRESETS = {
    'large': (25., 35., 100),
    'desk': (2., 3., 16),
}

ALPHA_MIN = numpy.nextafter(0., 1.)
ALPHA_MAX = numpy.nextafter(1., 0.)


class AdaptiveConfig(object):
    """Settings for the adaptive weight

    Parameters
    ----------
    c_o : `float`
        offset subtracted from the net gain
    c_d : `float`
        positive scale dividing the net gain
    validation : `list` of `~mixgrpo.tasks.Problem`
        the validation prompts, at least one
    alpha0 : `float`, optional
        weight used for the first iteration
    max_len : `int`, optional
        cap on the number of decoded response tokens
    """
    def __init__(self, c_o, c_d, validation, alpha0=0.5, max_len=6):
        self.c_o = float(c_o)
        self.c_d = float(c_d)
        self.validation = list(validation)
        self.alpha0 = float(alpha0)
        self.max_len = int(max_len)
        if self.c_d <= 0:
            raise ConfigError("adaptive.c_d must be positive")
        if not self.validation:
            raise ConfigError("the adaptive validation set is empty")
        if not 0. < self.alpha0 < 1.:
            raise ConfigError("adaptive.alpha0 must lie in (0, 1)")
        if self.max_len < 1:
            raise ConfigError("adaptive.max_len must be positive")

    @classmethod
    def from_preset(cls, name, validation=None, seed=0, difficulty=None,
                    **kwargs):
        """Build the configuration for a named preset

        If ``validation`` is not given, the preset's number of problems is
        drawn from the validation split.
        """
        try:
            c_o, c_d, size = PRESETS[name]
        except KeyError:
            raise ConfigError("unknown adaptive preset %r, choose one of: %s"
                              % (name, ', '.join(sorted(PRESETS))))
        if validation is None:
            validation = generate_problems(seed, size, difficulty=difficulty,
                                           split='validation')
        return cls(c_o, c_d, validation, **kwargs)


class AdaptiveState(object):
    """The current weight and the history of updates
    """
    def __init__(self, alpha=0.5):
        self.alpha = float(alpha)
        self.history = []

    def __repr__(self):
        return '<AdaptiveState(alpha={0}, updates={1})>'.format(
            self.alpha, len(self.history))


class DecodeCounter(object):
    """Count greedy decodes
    """
    def __init__(self):
        self.count = 0


# -- decoding -----------------------------------------------------------------

def greedy_decode_batch(scorer, prompts, max_len, counter=None):
    """Greedy-decode a response for each prompt

    At each step the most probable next token is appended, the lowest id
    winning ties, until ``<eos>`` or ``max_len`` tokens.

    Parameters
    ----------
    scorer : `~mixgrpo.model.Policy`, `~mixgrpo.mixer.MixedPolicy`, ...
        anything with a ``probs(contexts)`` method and a ``max_len``
    prompts : `list` of token sequences
        the prompts
    max_len : `int`
        cap on the number of response tokens
    counter : `DecodeCounter`, optional
        incremented once per prompt

    Returns
    -------
    responses : `list` of `tuple`
    """
    prompts = [list(p) for p in prompts]
    if counter is not None:
        counter.count += len(prompts)
    caps = [min(max_len, scorer.max_len - len(p)) for p in prompts]
    responses = [[] for _ in prompts]
    active = [k for k, cap in enumerate(caps) if cap > 0]
    while active:
        probs = scorer.probs([prompts[k] + responses[k] for k in active])
        remaining = []
        for row, k in zip(probs, active):
            token = int(numpy.argmax(row))
            responses[k].append(token)
            if token != EOS and len(responses[k]) < caps[k]:
                remaining.append(k)
        active = remaining
    return [tuple(r) for r in responses]


def greedy_decode(scorer, prompt, max_len, counter=None):
    """Greedy-decode a single response, see `greedy_decode_batch`
    """
    return greedy_decode_batch(scorer, [prompt], max_len, counter=counter)[0]


# -- weight update ------------------------------------------------------------

def count_forgetting_gain(policy, mix, cfg, counter=None):
    """Compare the policy and its mixture on the validation set

    Returns
    -------
    s1 : `int`
        problems the policy solves but the mixture does not
    s2 : `int`
        problems the mixture solves but the policy does not
    """
    prompts = [p.prompt for p in cfg.validation]
    alone = greedy_decode_batch(policy, prompts, cfg.max_len, counter)
    mixed = greedy_decode_batch(MixedPolicy(policy, mix), prompts,
                                cfg.max_len, counter)
    c_theta = numpy.array([verify(p, r).reward for p, r in
                           zip(cfg.validation, alone)], dtype=bool)
    c_mix = numpy.array([verify(p, r).reward for p, r in
                         zip(cfg.validation, mixed)], dtype=bool)
    return int((c_theta & ~c_mix).sum()), int((~c_theta & c_mix).sum())


def update_alpha(state, s1, s2, cfg, iteration=None):
    """Set ``state.alpha`` to ``expit((s2 - s1 - c_o) / c_d)``

    The result is kept strictly inside ``(0, 1)``.

    Returns
    -------
    alpha : `float`
        the new weight
    """
    alpha = float(expit((s2 - s1 - cfg.c_o) / cfg.c_d))
    alpha = float(numpy.clip(alpha, ALPHA_MIN, ALPHA_MAX))
    state.alpha = alpha
    state.history.append({'iteration': iteration, 's1': int(s1),
                          's2': int(s2), 'alpha': alpha})
    return alpha


class AdaptiveScheduler(object):
    """A `~mixgrpo.rl.run_grpo` hook that updates ``mix.alpha``

    Parameters
    ----------
    cfg : `AdaptiveConfig`
        the adaptive settings
    state : `AdaptiveState`, optional
        the state to update, default: a new state at ``cfg.alpha0``
    count_fn : `callable`, optional
        replaces `count_forgetting_gain`; called as
        ``count_fn(policy, mix, cfg)``
    """
    def __init__(self, cfg, state=None, count_fn=None):
        self.cfg = cfg
        self.state = state or AdaptiveState(cfg.alpha0)
        self.counter = DecodeCounter()
        self.count_fn = count_fn

    def __call__(self, iteration, policy, mix, record):
        before = self.counter.count
        if self.count_fn is None:
            s1, s2 = count_forgetting_gain(policy, mix, self.cfg,
                                           counter=self.counter)
        else:
            s1, s2 = self.count_fn(policy, mix, self.cfg)
        alpha = update_alpha(self.state, s1, s2, self.cfg,
                             iteration=iteration)
        mix.alpha = alpha
        record.update(s1=int(s1), s2=int(s2), next_alpha=alpha,
                      validation_decodes=self.counter.count - before)
        LOGGER.info("Iteration %d: forgetting %d, gain %d, alpha -> %.4f",
                    iteration + 1, s1, s2, alpha)


def run_adaptive_grpo(base, reference, data, grpo_cfg, adaptive_cfg,
                      hooks=(), scheme=LOGIT, count_fn=None):
    """Train with GRPO, updating the mixing weight after every iteration

    Parameters
    ----------
    base : `~mixgrpo.model.Policy`
        trainable starting point
    reference : `~mixgrpo.model.Policy`
        the frozen reference
    data : `list` of `~mixgrpo.tasks.Problem`
        the training prompts
    grpo_cfg : `~mixgrpo.rl.GrpoConfig`
        GRPO settings
    adaptive_cfg : `AdaptiveConfig`
        adaptive settings
    hooks : `list` of `callable`, optional
        further hooks, run after the weight update
    scheme : `str`, optional
        the mixing scheme, default: ``'logit'``
    count_fn : `callable`, optional
        see `AdaptiveScheduler`

    Returns
    -------
    policy : `~mixgrpo.model.Policy`
        the trained policy
    records : `list` of `dict`
        per-iteration metrics, including ``s1``, ``s2`` and ``next_alpha``
    state : `AdaptiveState`
        the final weight and its history
    """
    mix = MixSpec(scheme, adaptive_cfg.alpha0, reference)
    scheduler = AdaptiveScheduler(adaptive_cfg, count_fn=count_fn)
    policy, records = run_grpo(base, mix, data, grpo_cfg,
                               hooks=[scheduler] + list(hooks))
    return policy, records, scheduler.state
