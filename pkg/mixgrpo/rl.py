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

"""Group relative policy optimisation through a mixed policy

Rollouts are sampled from, and importance ratios computed on, the
mixture of the trainable policy with a frozen reference described by a
`~mixgrpo.mixer.MixSpec`. Only the trainable policy is updated.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor

import numpy

from . import ndgrad
from .errors import (ConfigError, ContractError, InputError)
from .mixer import (mixed_log_probs, mixed_probs)
from .model import get_optimizer
from .tasks import (EOS, verify)

__all__ = ['GrpoConfig', 'RolloutGroup', 'sample_rollouts',
           'group_advantages', 'importance_ratio', 'surrogate_objective',
           'run_grpo']

LOGGER = logging.getLogger(__name__)

RECORD_SCHEMA = 1


class GrpoConfig(object):
    """Settings for a GRPO run

    Parameters
    ----------
    iterations : `int`
        number of outer iterations ``T``
    inner_epochs : `int`
        gradient steps per outer iteration ``mu``
    group_size : `int`
        rollouts per prompt ``G``, at least 2
    clip_eps : `float`
        clip radius, in ``(0, 1)``
    adv_eps : `float`
        advantage stabiliser, positive
    learning_rate : `float`
        optimizer step size
    batch_size : `int`
        prompts per outer iteration
    max_response_len : `int`
        cap on the number of sampled response tokens
    kl_beta : `float`
        weight of the exact KL penalty against ``mix.reference``
    seed : `int`
        seed for prompt batches and rollouts
    optimizer : `str`
        ``'sgd'`` or ``'adam'``
    drop_zero_variance : `bool`
        discard groups whose rewards are all equal
    nproc : `int`
        worker processes for rollout sampling
    """
    def __init__(self, iterations=50, inner_epochs=1, group_size=8,
                 clip_eps=0.2, adv_eps=1e-4, learning_rate=0.2, batch_size=16,
                 max_response_len=6, kl_beta=0., seed=0, optimizer='sgd',
                 drop_zero_variance=False, nproc=1):
        self.iterations = int(iterations)
        self.inner_epochs = int(inner_epochs)
        self.group_size = int(group_size)
        self.clip_eps = float(clip_eps)
        self.adv_eps = float(adv_eps)
        self.learning_rate = float(learning_rate)
        self.batch_size = int(batch_size)
        self.max_response_len = int(max_response_len)
        self.kl_beta = float(kl_beta)
        self.seed = int(seed)
        self.optimizer = str(optimizer)
        self.drop_zero_variance = bool(drop_zero_variance)
        self.nproc = int(nproc)
        self._validate()

    def _validate(self):
        if self.iterations < 0:
            raise ConfigError("grpo.iterations must be nonnegative")
        for key in ('inner_epochs', 'batch_size', 'max_response_len',
                    'nproc'):
            if getattr(self, key) < 1:
                raise ConfigError("grpo.%s must be positive" % key)
        if self.group_size < 2:
            raise ConfigError("grpo.group_size must be at least 2")
        if not 0. < self.clip_eps < 1.:
            raise ConfigError("grpo.clip_eps must lie in (0, 1)")
        if self.adv_eps <= 0:
            raise ConfigError("grpo.adv_eps must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("grpo.learning_rate must be positive")
        if self.kl_beta < 0:
            raise ConfigError("grpo.kl_beta must be nonnegative")

    def as_dict(self):
        return dict((key, getattr(self, key)) for key in (
            'iterations', 'inner_epochs', 'group_size', 'clip_eps', 'adv_eps',
            'learning_rate', 'batch_size', 'max_response_len', 'kl_beta',
            'seed', 'optimizer', 'drop_zero_variance', 'nproc'))


class RolloutGroup(object):
    """The rollouts sampled for one prompt

    Parameters
    ----------
    problem : `~mixgrpo.tasks.Problem`
        the prompt and its gold answer
    responses : `list` of `tuple`
        the ``G`` sampled responses
    rewards : `array_like`
        the reward of each response
    advantages : `array_like`
        the group-relative advantage of each response
    old_logprobs : `list` of `numpy.ndarray`, optional
        per-token log-probabilities under the sampling policy
    """
    __slots__ = ('problem', 'responses', 'rewards', 'advantages',
                 'old_logprobs')

    def __init__(self, problem, responses, rewards, advantages,
                 old_logprobs=None):
        self.problem = problem
        self.responses = [tuple(r) for r in responses]
        self.rewards = numpy.asarray(rewards, dtype=float)
        self.advantages = numpy.asarray(advantages, dtype=float)
        self.old_logprobs = old_logprobs
        if len(self.responses) < 2:
            raise ConfigError("a rollout group needs at least 2 responses")

    def __len__(self):
        return len(self.responses)

    @property
    def n_tokens(self):
        return sum(len(r) for r in self.responses)

    def old_logprob(self, i, t):
        """The stored log-probability of token ``t`` of response ``i``
        """
        try:
            return float(self.old_logprobs[i][t])
        except (TypeError, IndexError):
            raise ContractError("no stored log-probability for token %d of "
                                "response %d" % (t, i))


# -- rollouts -----------------------------------------------------------------

def _response_cap(policy, problem, cfg):
    cap = min(cfg.max_response_len, policy.max_len - len(problem.prompt))
    if cap < 1:
        raise InputError("prompt of length %d leaves no room for a response"
                         % len(problem.prompt))
    return cap


def _sample(policy, mix, problems, cfg, iteration, offset=0):
    """Sample ``G`` responses per problem, token by token

    Each rollout draws from its own generator seeded by
    ``(seed, iteration, prompt index, rollout index)``.
    """
    size = cfg.group_size
    owner = []
    rngs = []
    caps = []
    for p, problem in enumerate(problems):
        cap = _response_cap(policy, problem, cfg)
        for g in range(size):
            owner.append(p)
            rngs.append(numpy.random.default_rng(
                [cfg.seed, iteration, offset + p, g]))
            caps.append(cap)
    responses = [[] for _ in owner]
    active = list(range(len(owner)))
    while active:
        contexts = [list(problems[owner[k]].prompt) + responses[k]
                    for k in active]
        probs = mixed_probs(policy, mix, contexts)
        remaining = []
        for row, k in zip(probs, active):
            cdf = numpy.cumsum(row)
            u = rngs[k].random() * cdf[-1]
            token = min(int(numpy.searchsorted(cdf, u, side='right')),
                        row.size - 1)
            responses[k].append(token)
            if token != EOS and len(responses[k]) < caps[k]:
                remaining.append(k)
        active = remaining
    return [[tuple(r) for r in responses[p * size:(p + 1) * size]]
            for p in range(len(problems))]


def _sample_chunk(args):
    return _sample(*args)


def _flatten(groups):
    """Every (context, token, advantage) triple in a batch of groups
    """
    contexts = []
    targets = []
    advantages = []
    for group in groups:
        prompt = list(group.problem.prompt)
        for i, response in enumerate(group.responses):
            for t, token in enumerate(response):
                contexts.append(prompt + list(response[:t]))
                targets.append(token)
                advantages.append(group.advantages[i])
    return contexts, targets, numpy.asarray(advantages, dtype=float)


def _token_logprobs(policy, mix, contexts, targets, logits=None):
    return ndgrad.pick(mixed_log_probs(policy, mix, contexts, logits=logits),
                       targets)


def _attach_old_logprobs(policy, mix, groups):
    contexts, targets, _ = _flatten(groups)
    with ndgrad.no_grad():
        flat = _token_logprobs(policy, mix, contexts, targets).data
    start = 0
    for group in groups:
        group.old_logprobs = []
        for response in group.responses:
            group.old_logprobs.append(flat[start:start + len(response)].copy())
            start += len(response)


def sample_rollouts(policy, mix, prompts, cfg, iteration=0):
    """Sample a group of responses for each prompt from the mixed policy

    Parameters
    ----------
    policy : `~mixgrpo.model.Policy`
        the sampling policy, normally a snapshot of the trainable policy
    mix : `~mixgrpo.mixer.MixSpec`
        how ``policy`` is combined with the reference
    prompts : `list` of `~mixgrpo.tasks.Problem`
        the prompts
    cfg : `GrpoConfig`
        supplies ``group_size``, ``max_response_len``, ``adv_eps``,
        ``seed`` and ``nproc``
    iteration : `int`, optional
        the outer iteration, mixed into every rollout seed

    Returns
    -------
    groups : `list` of `RolloutGroup`
        one group per prompt, with rewards, advantages, and the per-token
        log-probabilities of the sampling policy
    """
    prompts = list(prompts)
    if cfg.nproc > 1 and len(prompts) > 1:
        bounds = numpy.linspace(0, len(prompts),
                                min(cfg.nproc, len(prompts)) + 1).astype(int)
        chunks = [(policy, mix, prompts[a:b], cfg, iteration, a)
                  for a, b in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(max_workers=cfg.nproc) as pool:
            sampled = [r for part in pool.map(_sample_chunk, chunks)
                       for r in part]
    else:
        sampled = _sample(policy, mix, prompts, cfg, iteration)

    groups = []
    for problem, responses in zip(prompts, sampled):
        rewards = [verify(problem, r).reward for r in responses]
        groups.append(RolloutGroup(problem, responses, rewards,
                                   group_advantages(rewards, cfg.adv_eps)))
    _attach_old_logprobs(policy, mix, groups)
    return groups


# -- objective ----------------------------------------------------------------

def group_advantages(rewards, eps_adv):
    """Normalise rewards within a group

    Returns ``(R - mean(R)) / (std(R) + eps_adv)`` with the population
    standard deviation, or zeros if every reward is the same.
    """
    rewards = numpy.asarray(rewards, dtype=float)
    if rewards.ndim != 1 or rewards.size < 2:
        raise ConfigError("advantages need a group of at least 2 rewards")
    std = rewards.std()
    if std == 0:
        return numpy.zeros_like(rewards)
    return (rewards - rewards.mean()) / (std + eps_adv)


def importance_ratio(policy, mix, group, i, t):
    """Ratio of the current to the stored mixed probability of one token

    Raises
    ------
    mixgrpo.errors.ContractError
        if ``group`` holds no stored log-probability for the token
    """
    old = group.old_logprob(i, t)
    response = group.responses[i]
    context = list(group.problem.prompt) + list(response[:t])
    with ndgrad.no_grad():
        new = mixed_log_probs(policy, mix, [context]).data[0, response[t]]
    return float(numpy.exp(new - old))


def _surrogate(policy, mix, groups, cfg):
    """Build the clipped objective and report its diagnostics
    """
    if not groups:
        raise ConfigError("no rollout groups to optimise")
    contexts, targets, advantages = _flatten(groups)
    if any(g.old_logprobs is None for g in groups):
        raise ContractError("rollout group has no stored log-probabilities")
    old = numpy.concatenate([lp for g in groups for lp in g.old_logprobs])
    if old.size != len(targets):
        raise ContractError("stored log-probabilities do not cover every "
                            "response token")
    z = policy.forward(contexts)
    new = _token_logprobs(policy, mix, contexts, targets, logits=z)
    ratio = ndgrad.exp(ndgrad.sub(new, ndgrad.Tensor(old)))
    adv = ndgrad.Tensor(advantages)
    low, high = 1. - cfg.clip_eps, 1. + cfg.clip_eps
    objective = ndgrad.mean(ndgrad.minimum(
        ndgrad.mul(ratio, adv),
        ndgrad.mul(ndgrad.clip(ratio, low, high), adv)))
    stats = {
        'n_tokens': len(targets),
        'clip_fraction': float(((ratio.data < low) |
                                (ratio.data > high)).mean()),
        'max_ratio_deviation': float(numpy.abs(ratio.data - 1.).max()),
        'kl': None,
    }
    if cfg.kl_beta > 0:
        if mix.reference is None:
            raise ConfigError("a KL penalty needs a reference policy")
        with ndgrad.no_grad():
            ref = ndgrad.log_softmax(mix.reference.forward(contexts)).data
        logq = ndgrad.log_softmax(z)
        kl = ndgrad.mean(ndgrad.sum(ndgrad.mul(
            ndgrad.exp(logq), ndgrad.sub(logq, ndgrad.Tensor(ref))), axis=-1))
        objective = ndgrad.sub(objective, ndgrad.mul(kl, cfg.kl_beta))
        stats['kl'] = kl.item()
    stats['objective'] = objective.item()
    return objective, stats


def surrogate_objective(policy, mix, groups, cfg):
    """The token-normalised clipped surrogate ``J``, to be maximised

    ``J`` averages ``min(rho * A, clip(rho, 1 - eps, 1 + eps) * A)`` over
    every response token in the batch, where ``rho`` is the importance
    ratio of the mixed policy and ``A`` the advantage of the token's
    response. With ``cfg.kl_beta > 0`` the mean exact
    ``KL(policy || reference)`` over the same contexts, times
    ``kl_beta``, is subtracted.

    Returns
    -------
    objective : `~mixgrpo.ndgrad.Tensor`
        a scalar, differentiable with respect to ``policy``
    """
    return _surrogate(policy, mix, groups, cfg)[0]


# -- training loop ------------------------------------------------------------

def _batch(data, cfg, iteration):
    rng = numpy.random.default_rng([cfg.seed, iteration])
    size = min(cfg.batch_size, len(data))
    return [data[i] for i in rng.choice(len(data), size=size, replace=False)]


def run_grpo(base, mix, data, cfg, hooks=()):
    """Train a policy with GRPO on the mixture described by ``mix``

    Each outer iteration draws a batch of prompts, snapshots the policy,
    samples rollouts from the mixed snapshot, and takes
    ``cfg.inner_epochs`` descent steps on ``-J``.

    Parameters
    ----------
    base : `~mixgrpo.model.Policy`
        trainable starting point; it is copied, not modified
    mix : `~mixgrpo.mixer.MixSpec`
        the mixing configuration; hooks may change ``mix.alpha`` between
        iterations
    data : `list` of `~mixgrpo.tasks.Problem`
        the training prompts
    cfg : `GrpoConfig`
        training settings
    hooks : `list` of `callable`, optional
        each is called as ``hook(iteration, policy, mix, record)`` after
        every outer iteration, in order, and may add fields to ``record``

    Returns
    -------
    policy : `~mixgrpo.model.Policy`
        the trained policy
    records : `list` of `dict`
        one metrics record per outer iteration
    """
    if not base.trainable:
        raise ContractError("GRPO needs a trainable starting policy")
    data = list(data)
    if not data and cfg.iterations:
        raise ConfigError("no training prompts given")
    reference = mix.reference
    checksum = reference.checksum() if reference is not None else None
    policy = base.copy(trainable=True)
    optimizer = get_optimizer(cfg.optimizer, cfg.learning_rate)
    records = []
    start = time.perf_counter()

    for iteration in range(cfg.iterations):
        alpha = mix.alpha
        old = policy.snapshot()
        groups = sample_rollouts(old, mix, _batch(data, cfg, iteration), cfg,
                                 iteration=iteration)
        rewards = numpy.concatenate([g.rewards for g in groups])
        advantages = numpy.concatenate([g.advantages for g in groups])
        if cfg.drop_zero_variance:
            groups = [g for g in groups if g.rewards.std() > 0]
        stats = {}
        for step in range(cfg.inner_epochs if groups else 0):
            objective, current = _surrogate(policy, mix, groups, cfg)
            ndgrad.backward(ndgrad.neg(objective))
            optimizer.step(policy)
            if step == 0:
                stats = current
            LOGGER.debug("Iteration %d step %d: J = %.6f", iteration, step,
                         current['objective'])
        record = {
            'schema': RECORD_SCHEMA,
            'iteration': iteration,
            'mean_reward': float(rewards.mean()),
            'mean_abs_advantage': float(numpy.abs(advantages).mean()),
            'clip_fraction': stats.get('clip_fraction', 0.),
            'max_ratio_deviation': stats.get('max_ratio_deviation', 0.),
            'alpha': alpha,
            'kl': stats.get('kl'),
            'objective': stats.get('objective', 0.),
            'n_tokens': stats.get('n_tokens', 0),
            'n_groups': len(groups),
            'wall_time': time.perf_counter() - start,
        }
        LOGGER.info("Iteration %d/%d: mean reward %.3f, alpha %.3f",
                    iteration + 1, cfg.iterations, record['mean_reward'],
                    alpha)
        for hook in hooks:
            hook(iteration, policy, mix, record)
        records.append(record)

    if reference is not None and reference.checksum() != checksum:
        raise ContractError("the reference policy changed during training")
    return policy, records
