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

"""Tests for :mod:`mixgrpo.mixer`
"""

import numpy
import pytest
from hypothesis import (given, strategies as st)
from hypothesis.extra.numpy import arrays
from numpy.testing import (assert_allclose, assert_array_equal)
from scipy.special import softmax

from mixgrpo import (mixer, ndgrad)
from mixgrpo.errors import (ConfigError, DomainError, InputError, ShapeError)

from .utils import constant_policy

LOGITS = arrays(numpy.float64, 7,
                elements=st.floats(min_value=-6., max_value=6.))
ALPHAS = st.floats(min_value=0., max_value=1.)


# -- MixSpec ------------------------------------------------------------------

def test_mixspec(tiny_policy, tiny_reference):
    mix = mixer.MixSpec('LOGIT', .3, tiny_reference)
    assert mix.scheme == mixer.LOGIT
    assert mix.alpha == .3
    mix.alpha = 1
    assert mix.alpha == 1.
    assert mixer.MixSpec().scheme == mixer.NONE
    with pytest.raises(ConfigError):
        mixer.MixSpec('geometric', .5, tiny_reference)
    with pytest.raises(ConfigError):
        mixer.MixSpec(mixer.LOGIT, .5)
    with pytest.raises(ConfigError):
        mixer.MixSpec(mixer.LOGIT, 1.5, tiny_reference)
    with pytest.raises(ConfigError):
        mixer.MixSpec(mixer.PROB, .5, tiny_policy)


# -- mix_logits ---------------------------------------------------------------

def test_mix_logits_endpoints():
    z_train = numpy.array([.3, -1.7, 2.2])
    z_ref = numpy.array([1.1, 0.4, -3.])
    assert_array_equal(mixer.mix_logits(z_train, z_ref, 0.), z_train)
    assert_array_equal(mixer.mix_logits(z_train, z_ref, 1.), z_ref)


def test_mix_logits_symmetric():
    assert_array_equal(mixer.mix_logits([1., 3.], [3., 1.], .5), [2., 2.])


def test_mix_logits_errors():
    with pytest.raises(ShapeError):
        mixer.mix_logits([1., 2.], [1., 2., 3.], .5)
    with pytest.raises(ConfigError):
        mixer.mix_logits([1., 2.], [1., 2.], -.1)


def test_mix_logits_gates_gradient():
    z = ndgrad.parameter([1., 2., 3.])
    out = mixer.mix_logits(z, numpy.zeros(3), 1.)
    ndgrad.backward(ndgrad.sum(ndgrad.log_softmax(out)))
    assert_array_equal(z.grad, numpy.zeros(3))


# -- mixed distributions ------------------------------------------------------

def test_mixed_token_dist_none(tiny_policy):
    context = [17, 3, 10, 4, 14, 13]
    assert_allclose(
        mixer.mixed_token_dist(tiny_policy, mixer.MixSpec(), context),
        softmax(tiny_policy.logits(context)), rtol=1e-13)


@pytest.mark.parametrize('alpha', [0., .25, .5, 1.])
def test_mixed_token_dist_fixed_point(tiny_policy, alpha):
    mix = mixer.MixSpec(mixer.LOGIT, alpha, tiny_policy.snapshot())
    context = [17, 1, 2, 10, 7, 14, 13]
    assert_allclose(mixer.mixed_token_dist(tiny_policy, mix, context),
                    tiny_policy.probs([context])[0], rtol=1e-12)


def test_mixed_token_dist_geometric_mean():
    train = constant_policy(numpy.log([.8, .2]), trainable=True)
    reference = constant_policy(numpy.log([.2, .8]))
    mix = mixer.MixSpec(mixer.LOGIT, .5, reference)
    assert_allclose(mixer.mixed_token_dist(train, mix, [0]), [.5, .5],
                    rtol=1e-12)


def test_mixed_token_dist_prob():
    train = constant_policy(numpy.log([.8, .2]), trainable=True)
    reference = constant_policy(numpy.log([.2, .8]))
    mix = mixer.MixSpec(mixer.PROB, .25, reference)
    assert_allclose(mixer.mixed_token_dist(train, mix, [1]), [.65, .35],
                    rtol=1e-12)
    logp = mixer.mixed_log_probs(train, mix, [[1]])
    assert_allclose(logp.data[0], numpy.log([.65, .35]), rtol=1e-12)


def test_mixed_log_probs_prob_underflow():
    train = constant_policy([0., -800.], trainable=True)
    reference = constant_policy([0., -900.])
    mix = mixer.MixSpec(mixer.PROB, .5, reference)
    logp = mixer.mixed_log_probs(train, mix, [[1]])
    assert_allclose(logp.data[0], [0., -800. + numpy.log(.5)], atol=1e-9)
    ndgrad.backward(ndgrad.sum(ndgrad.pick(logp, [1])))
    grad = train.params['output_projection'].grad
    assert numpy.isfinite(grad).all()
    assert_allclose(grad[0], [-1., 1.], atol=1e-12)


def test_mixed_log_probs_alpha_one_has_no_gradient(tiny_policy,
                                                   tiny_reference):
    mix = mixer.MixSpec(mixer.LOGIT, 1., tiny_reference)
    logp = mixer.mixed_log_probs(tiny_policy, mix, [[17, 1], [17, 2, 3]])
    ndgrad.backward(ndgrad.sum(ndgrad.pick(logp, [18, 15])))
    for tensor in tiny_policy.parameters():
        assert not tensor.grad.any()


def test_mixed_policy(tiny_policy, tiny_reference):
    mix = mixer.MixSpec(mixer.PROB, .4, tiny_reference)
    scorer = mixer.MixedPolicy(tiny_policy, mix)
    contexts = [[17, 1], [17, 2, 3]]
    assert scorer.max_len == tiny_policy.max_len
    assert_array_equal(scorer.probs(contexts),
                       mixer.mixed_probs(tiny_policy, mix, contexts))


# -- sequence_logprob ---------------------------------------------------------

def test_sequence_logprob(tiny_policy, tiny_reference):
    mix = mixer.MixSpec(mixer.LOGIT, .5, tiny_reference)
    prompt = [17, 4, 10, 5, 14, 13]
    assert mixer.sequence_logprob(tiny_policy, mix, prompt, []) == 0.
    one = mixer.sequence_logprob(tiny_policy, mix, prompt, [15])
    assert one == pytest.approx(numpy.log(
        mixer.mixed_token_dist(tiny_policy, mix, prompt)[15]), abs=1e-12)
    response = [15, 9, 16]
    expected = sum(numpy.log(mixer.mixed_token_dist(
        tiny_policy, mix, prompt + response[:t])[response[t]])
        for t in range(3))
    assert mixer.sequence_logprob(tiny_policy, mix, prompt, response) == \
        pytest.approx(expected, abs=1e-10)


def test_sequence_logprob_too_long(tiny_policy):
    with pytest.raises(InputError):
        mixer.sequence_logprob(tiny_policy, mixer.MixSpec(), [17] * 10,
                               [1] * 7)


# -- product of experts -------------------------------------------------------

def test_poe_check_simple():
    assert mixer.poe_check([.8, .2], [.2, .8], .5) <= 1e-12
    assert mixer.poe_check([.1, .3, .6], [.1, .3, .6], .7) <= 1e-12


def test_poe_check_errors():
    with pytest.raises(DomainError):
        mixer.poe_check([1., 0.], [.5, .5], .5)
    with pytest.raises(DomainError):
        mixer.poe_check([.6, .6], [.5, .5], .5)
    with pytest.raises(ShapeError):
        mixer.poe_check([.5, .5], [.2, .3, .5], .5)


@given(LOGITS, LOGITS, ALPHAS)
def test_poe_identity(z1, z2, alpha):
    assert mixer.poe_check(softmax(z1), softmax(z2), alpha) <= 1e-10


@given(LOGITS, ALPHAS)
def test_mixing_with_itself(z, alpha):
    pi = softmax(z)
    mixed = ndgrad.softmax(mixer.mix_logits(numpy.log(pi), numpy.log(pi),
                                            alpha)).data
    assert numpy.abs(mixed - pi).max() <= 1e-12


@given(LOGITS, LOGITS, ALPHAS,
       st.floats(min_value=-50., max_value=50.),
       st.floats(min_value=-50., max_value=50.))
def test_shift_invariance(z1, z2, alpha, c1, c2):
    base = ndgrad.softmax(mixer.mix_logits(z1, z2, alpha)).data
    moved = ndgrad.softmax(mixer.mix_logits(z1 + c1, z2 + c2, alpha)).data
    assert_allclose(moved, base, rtol=1e-10, atol=1e-13)


# -- ensembles ----------------------------------------------------------------

def test_ensemble_single_member(tiny_policy):
    context = [17, 8, 10, 8, 14, 13]
    assert_array_equal(mixer.ensemble_mix_logits([(tiny_policy, 1.)],
                                                 context),
                       tiny_policy.logits(context))


def test_ensemble_reduces_to_mix_logits(tiny_policy, tiny_reference):
    context = [17, 8, 10, 8, 14, 13]
    alpha = .3
    assert_allclose(
        mixer.ensemble_mix_logits([(tiny_policy, 1 - alpha),
                                   (tiny_reference, alpha)], context),
        mixer.mix_logits(tiny_policy.logits(context),
                         tiny_reference.logits(context), alpha),
        rtol=1e-14)


def test_ensemble_equal_weights(tiny_policy, tiny_reference):
    from mixgrpo.model import init_policy
    third = init_policy(tiny_policy.vocab_size, width=8, seed=11)
    members = [(tiny_policy, 1 / 3.), (tiny_reference, 1 / 3.),
               (third, 1 / 3.)]
    context = [17, 1, 10, 1, 14, 13]
    expected = numpy.mean([p.logits(context) for p, _ in members], axis=0)
    assert_allclose(mixer.ensemble_mix_logits(members, context), expected,
                    rtol=1e-12, atol=1e-15)


def test_ensemble_weights(tiny_policy, tiny_reference):
    with pytest.raises(ConfigError):
        mixer.EnsembleSpec([(tiny_policy, .5), (tiny_reference, .6)])
    with pytest.raises(ConfigError):
        mixer.EnsembleSpec([(tiny_policy, 1.5), (tiny_reference, -.5)])
    with pytest.raises(ConfigError):
        mixer.EnsembleSpec([])
    ensemble = mixer.EnsembleSpec([(tiny_policy, .5), (tiny_reference, .5)])
    assert_allclose(ensemble.probs([[17, 2]]).sum(), 1., rtol=1e-14)


# -- self-test ----------------------------------------------------------------

def test_selftest():
    deviations = mixer.selftest(trials=200)
    assert set(deviations) == {'poe', 'identical', 'shift', 'gate-closed',
                               'gate-open'}
    assert max(deviations.values()) <= 1e-10
    assert deviations['gate-closed'] == 0.
    assert deviations['gate-open'] == 0.


def test_selftest_bad_alpha():
    with pytest.raises(ConfigError):
        mixer.selftest(trials=1, alpha=2.)
