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

"""Combination of a trainable policy with frozen experts

Three schemes are supported:

- ``'logit'``: ``softmax((1 - alpha) * z_train + alpha * z_ref)``, a
  renormalised weighted geometric mean of the two distributions
- ``'prob'``: ``(1 - alpha) * softmax(z_train) + alpha * softmax(z_ref)``,
  the arithmetic mean
- ``'none'``: ``softmax(z_train)``

Anything with a ``probs(contexts)`` method, a ``vocab_size`` and a
``max_len`` can be decoded from; `~mixgrpo.model.Policy`, `MixedPolicy`
and `EnsembleSpec` all qualify.
"""

import decorator

import numpy

from . import ndgrad
from .errors import (ConfigError, DomainError, ShapeError)

__all__ = ['LOGIT', 'PROB', 'NONE', 'SCHEMES', 'MixSpec', 'MixedPolicy',
           'EnsembleSpec', 'mix_logits', 'mixed_log_probs', 'mixed_probs',
           'mixed_token_dist', 'sequence_logprob', 'poe_check',
           'ensemble_mix_logits', 'selftest']

LOGIT = 'logit'
PROB = 'prob'
NONE = 'none'
SCHEMES = (LOGIT, PROB, NONE)

WEIGHT_TOLERANCE = 1e-12


def check_alpha(alpha):
    """Return ``alpha`` as a `float`, raising if it is outside ``[0, 1]``
    """
    alpha = float(alpha)
    if not 0. <= alpha <= 1.:
        raise ConfigError("mixing weight must lie in [0, 1], got %r" % alpha)
    return alpha


# -----------------------------------------------------------------------------
# Utilities

@decorator.decorator
def _use_distributions(f, pi1, pi2, *args, **kwargs):
    """Decorate a method to convert its first two arguments into strictly
    positive probability vectors
    """
    dists = []
    for pi in (pi1, pi2):
        pi = numpy.asarray(pi, dtype=float)
        if pi.ndim != 1:
            raise ShapeError("distributions must be vectors")
        if (pi <= 0).any():
            raise DomainError("distributions must be strictly positive")
        if abs(pi.sum() - 1.) > 1e-9:
            raise DomainError("distribution sums to %r, not 1" % pi.sum())
        dists.append(pi)
    if dists[0].shape != dists[1].shape:
        raise ShapeError("distributions have different lengths")
    return f(dists[0], dists[1], *args, **kwargs)


# -----------------------------------------------------------------------------
# Mixing configuration

class MixSpec(object):
    """How the trainable policy is combined with a frozen reference

    Parameters
    ----------
    scheme : `str`
        one of ``'logit'``, ``'prob'``, or ``'none'``
    alpha : `float`, optional
        weight of the reference in ``[0, 1]``, default: ``0``
    reference : `~mixgrpo.model.Policy`, optional
        the frozen reference policy; required unless ``scheme='none'``
    """
    __slots__ = ('_scheme', '_alpha', '_reference')

    def __init__(self, scheme=NONE, alpha=0., reference=None):
        self.scheme = scheme
        self.alpha = alpha
        self.reference = reference

    @property
    def scheme(self):
        """The mixing scheme

        :type: `str`
        """
        return self._scheme

    @scheme.setter
    def scheme(self, scheme):
        scheme = str(scheme).lower()
        if scheme not in SCHEMES:
            raise ConfigError("unknown mixing scheme %r, choose one of: %s"
                              % (scheme, ', '.join(SCHEMES)))
        self._scheme = scheme

    @property
    def alpha(self):
        """The weight given to the reference

        :type: `float`
        """
        return self._alpha

    @alpha.setter
    def alpha(self, alpha):
        self._alpha = check_alpha(alpha)

    @property
    def reference(self):
        """The frozen reference policy

        :type: `~mixgrpo.model.Policy`
        """
        return self._reference

    @reference.setter
    def reference(self, policy):
        if policy is None and self._scheme != NONE:
            raise ConfigError("scheme %r needs a reference policy"
                              % self._scheme)
        if policy is not None and policy.trainable:
            raise ConfigError("the reference policy must be frozen")
        self._reference = policy

    def copy(self):
        return type(self)(self.scheme, self.alpha, self.reference)

    def __repr__(self):
        return '<MixSpec({0!r}, alpha={1})>'.format(self.scheme, self.alpha)


class MixedPolicy(object):
    """A read-only scorer for ``policy`` combined according to ``mix``
    """
    def __init__(self, policy, mix):
        self.policy = policy
        self.mix = mix

    @property
    def vocab_size(self):
        return self.policy.vocab_size

    @property
    def max_len(self):
        return self.policy.max_len

    def probs(self, contexts):
        return mixed_probs(self.policy, self.mix, contexts)


# -----------------------------------------------------------------------------
# Two-way mixing

def mix_logits(z_train, z_ref, alpha):
    """Return ``(1 - alpha) * z_train + alpha * z_ref``

    Parameters
    ----------
    z_train : `~mixgrpo.ndgrad.Tensor`, `numpy.ndarray`
        logits of the trainable policy; the result is differentiable
        with respect to this argument when it is a `Tensor`
    z_ref : `~mixgrpo.ndgrad.Tensor`, `numpy.ndarray`
        logits of the reference, always treated as constant
    alpha : `float`
        weight of the reference in ``[0, 1]``
    """
    alpha = check_alpha(alpha)
    if isinstance(z_ref, ndgrad.Tensor):
        z_ref = z_ref.data
    z_ref = numpy.asarray(z_ref, dtype=float)
    if numpy.shape(z_train) != z_ref.shape:
        raise ShapeError("logit vectors differ in shape: %s and %s"
                         % (numpy.shape(z_train), z_ref.shape))
    if isinstance(z_train, ndgrad.Tensor):
        return ndgrad.add(ndgrad.mul(z_train, 1. - alpha),
                          ndgrad.Tensor(z_ref * alpha))
    return numpy.asarray(z_train, dtype=float) * (1. - alpha) + z_ref * alpha


def _reference_logits(mix, contexts):
    with ndgrad.no_grad():
        return mix.reference.forward(contexts).data


def mixed_log_probs(policy, mix, contexts, logits=None):
    """Log-probabilities of the mixed next-token distributions

    Parameters
    ----------
    policy : `~mixgrpo.model.Policy`
        the trainable (or snapshot) policy
    mix : `MixSpec`
        the mixing configuration
    contexts : `list` of token sequences
        the contexts to score
    logits : `~mixgrpo.ndgrad.Tensor`, optional
        the output of ``policy.forward(contexts)`` if already computed

    Returns
    -------
    logp : `~mixgrpo.ndgrad.Tensor`
        matrix of shape ``(len(contexts), vocab_size)``, differentiable with
        respect to the parameters of ``policy``
    """
    z = policy.forward(contexts) if logits is None else logits
    if mix.scheme == NONE:
        return ndgrad.log_softmax(z)
    z_ref = _reference_logits(mix, contexts)
    if mix.scheme == LOGIT:
        return ndgrad.log_softmax(mix_logits(z, z_ref, mix.alpha))
    # log((1 - a) p + a q), in log space
    logq = ndgrad.log_softmax(z_ref).data
    if mix.alpha == 0.:
        return ndgrad.log_softmax(z)
    if mix.alpha == 1.:
        return ndgrad.add(ndgrad.mul(ndgrad.log_softmax(z), 0.),
                          ndgrad.Tensor(logq))
    return ndgrad.logaddexp(
        ndgrad.add(ndgrad.log_softmax(z), float(numpy.log1p(-mix.alpha))),
        ndgrad.Tensor(logq + numpy.log(mix.alpha)))


def mixed_probs(policy, mix, contexts):
    """Mixed next-token distributions as a plain array (no graph)
    """
    with ndgrad.no_grad():
        z = policy.forward(contexts)
        if mix.scheme == NONE:
            return ndgrad.softmax(z).data
        z_ref = _reference_logits(mix, contexts)
        if mix.scheme == LOGIT:
            return ndgrad.softmax(mix_logits(z, z_ref, mix.alpha)).data
        return (ndgrad.softmax(z).data * (1. - mix.alpha)
                + ndgrad.softmax(z_ref).data * mix.alpha)


def mixed_token_dist(policy, mix, context):
    """The mixed next-token distribution at a single context
    """
    return mixed_probs(policy, mix, [context])[0]


def sequence_logprob(policy, mix, prompt, response):
    """Log-probability of ``response`` given ``prompt`` under the mixture

    The sequence probability factorises over response tokens, each scored
    in the context of the prompt and the preceding response tokens.

    Returns
    -------
    logp : `float`
        ``0.0`` for an empty response
    """
    from .errors import InputError
    prompt = list(prompt)
    response = list(response)
    if len(prompt) + len(response) > policy.max_len:
        raise InputError("prompt and response exceed the maximum length %d"
                         % policy.max_len)
    if not response:
        return 0.
    contexts = [prompt + response[:t] for t in range(len(response))]
    with ndgrad.no_grad():
        logp = mixed_log_probs(policy, mix, contexts)
    return float(ndgrad.pick(logp, response).data.sum())


@_use_distributions
def poe_check(pi1, pi2, alpha):
    """Deviation between logit mixing and the normalised geometric mean

    Parameters
    ----------
    pi1, pi2 : `array_like`
        strictly positive probability vectors of equal length
    alpha : `float`
        weight of ``pi2`` in ``[0, 1]``

    Returns
    -------
    deviation : `float`
        ``max |softmax((1-a) log pi1 + a log pi2) - pi1^(1-a) pi2^a / Z|``
    """
    alpha = check_alpha(alpha)
    mixed = ndgrad.softmax(
        mix_logits(numpy.log(pi1), numpy.log(pi2), alpha)).data
    product = pi1 ** (1. - alpha) * pi2 ** alpha
    return float(numpy.abs(mixed - product / product.sum()).max())


# -----------------------------------------------------------------------------
# K-way mixing

class EnsembleSpec(object):
    """A weighted logit ensemble of policies

    Parameters
    ----------
    members : `list` of `tuple`
        ``(policy, weight)`` pairs; weights are nonnegative and sum to 1
    """
    def __init__(self, members):
        members = [(policy, float(weight)) for policy, weight in members]
        if not members:
            raise ConfigError("an ensemble needs at least one member")
        if any(weight < 0 for _, weight in members):
            raise ConfigError("ensemble weights must be nonnegative")
        total = numpy.sum([weight for _, weight in members])
        if abs(total - 1.) > WEIGHT_TOLERANCE:
            raise ConfigError("ensemble weights sum to %r, not 1" % total)
        shapes = set((p.vocab_size, p.max_len) for p, _ in members)
        if len(shapes) != 1:
            raise ConfigError("ensemble members disagree on vocabulary size "
                              "or maximum length")
        self.members = members

    @property
    def vocab_size(self):
        return self.members[0][0].vocab_size

    @property
    def max_len(self):
        return self.members[0][0].max_len

    def logits(self, contexts):
        """Weighted sum of member logits for a batch of contexts
        """
        out = None
        with ndgrad.no_grad():
            for policy, weight in self.members:
                term = policy.forward(contexts).data * weight
                out = term if out is None else out + term
        return out

    def probs(self, contexts):
        return ndgrad.softmax(self.logits(contexts)).data


def ensemble_mix_logits(members, context):
    """Weighted sum of the member logits at ``context``

    For two members weighted ``(1 - alpha, alpha)`` this equals
    `mix_logits` of their logits.
    """
    if not isinstance(members, EnsembleSpec):
        members = EnsembleSpec(members)
    return members.logits([context])[0]


# -----------------------------------------------------------------------------
# Property suite

def selftest(trials=1000, vocab_size=7, seed=0, alpha=None):
    """Evaluate the mixing identities on random inputs

    Parameters
    ----------
    trials : `int`, optional
        number of random ``(pi1, pi2, alpha)`` triples
    vocab_size : `int`, optional
        length of each random distribution
    seed : `int`, optional
        seed for the random generator
    alpha : `float`, optional
        fix the mixing weight instead of drawing it

    Returns
    -------
    deviations : `dict`
        the maximum deviation of each property: ``'poe'`` (geometric-mean
        identity), ``'identical'`` (mixing a distribution with itself),
        ``'shift'`` (adding constants to the logits), ``'gate-closed'``
        (gradient at ``alpha=1``), and ``'gate-open'`` (gradient at
        ``alpha=0`` against the unmixed gradient)
    """
    from .model import init_policy

    if alpha is not None:
        alpha = check_alpha(alpha)
    rng = numpy.random.default_rng(seed)
    out = dict.fromkeys(('poe', 'identical', 'shift'), 0.)
    for _ in range(trials):
        a = rng.uniform() if alpha is None else alpha
        pi1 = ndgrad.softmax(rng.normal(scale=2., size=vocab_size)).data
        pi2 = ndgrad.softmax(rng.normal(scale=2., size=vocab_size)).data
        out['poe'] = max(out['poe'], poe_check(pi1, pi2, a))
        same = ndgrad.softmax(mix_logits(numpy.log(pi1), numpy.log(pi1),
                                         a)).data
        out['identical'] = max(out['identical'],
                               float(numpy.abs(same - pi1).max()))
        z1, z2 = numpy.log(pi1), numpy.log(pi2)
        shifts = rng.normal(scale=10., size=2)
        base = ndgrad.softmax(mix_logits(z1, z2, a)).data
        moved = ndgrad.softmax(mix_logits(z1 + shifts[0], z2 + shifts[1],
                                          a)).data
        out['shift'] = max(out['shift'], float(numpy.abs(base - moved).max()))

    # gradient gating on a small random network
    policy = init_policy(vocab_size, width=4, max_len=4, seed=seed)
    reference = init_policy(vocab_size, width=4, max_len=4,
                            seed=seed + 1).snapshot()
    contexts = [[1], [0, 2], [3, 1, 4 % vocab_size]]
    targets = [0, 1, 2 % vocab_size]

    def gradient(mix):
        policy.zero_grad()
        logp = mixed_log_probs(policy, mix, contexts)
        ndgrad.backward(ndgrad.sum(ndgrad.pick(logp, targets)))
        grads = numpy.concatenate([t.grad.ravel() for t in
                                   policy.parameters()])
        policy.zero_grad()
        return grads

    closed = gradient(MixSpec(LOGIT, 1., reference))
    out['gate-closed'] = float(numpy.abs(closed).max())
    opened = gradient(MixSpec(LOGIT, 0., reference))
    unmixed = gradient(MixSpec(NONE))
    out['gate-open'] = float(numpy.abs(opened - unmixed).max())
    return out
