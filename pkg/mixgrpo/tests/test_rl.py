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

"""Tests for :mod:`mixgrpo.rl`
"""

import numpy
import pytest
from numpy.testing import (assert_allclose, assert_array_equal)

from mixgrpo import (ndgrad, rl)
from mixgrpo.errors import (ConfigError, ContractError)
from mixgrpo.mixer import (LOGIT, NONE, PROB, MixSpec, mixed_token_dist,
                           sequence_logprob)
from mixgrpo.model import init_policy
from mixgrpo.tasks import (EOS, VOCAB_SIZE, generate_problems, make_problem)

from .utils import constant_policy


def _config(**kwargs):
    kwargs.setdefault('group_size', 4)
    kwargs.setdefault('batch_size', 4)
    kwargs.setdefault('max_response_len', 5)
    kwargs.setdefault('iterations', 3)
    return rl.GrpoConfig(**kwargs)


def _group(policy, mix, problem, responses, advantages):
    """Build a group whose stored log-probabilities are recomputed token
    by token
    """
    old = [numpy.log([mixed_token_dist(policy, mix, list(problem.prompt) +
                                       list(r[:t]))[r[t]]
                      for t in range(len(r))]) for r in responses]
    return rl.RolloutGroup(problem, responses, [0] * len(responses),
                           advantages, old_logprobs=old)


def _strip(records):
    return [dict((k, v) for k, v in r.items() if k != 'wall_time')
            for r in records]


# -- configuration ------------------------------------------------------------

@pytest.mark.parametrize('kwargs', [
    {'group_size': 1},
    {'clip_eps': 0.},
    {'clip_eps': 1.},
    {'adv_eps': 0.},
    {'learning_rate': -1.},
    {'kl_beta': -.1},
    {'iterations': -1},
    {'batch_size': 0},
])
def test_grpo_config_errors(kwargs):
    with pytest.raises(ConfigError):
        rl.GrpoConfig(**kwargs)


def test_grpo_config_defaults():
    cfg = rl.GrpoConfig()
    assert cfg.as_dict()['clip_eps'] == .2
    assert cfg.kl_beta == 0.
    assert cfg.optimizer == 'sgd'


# -- advantages ---------------------------------------------------------------

def test_advantages_zero_variance():
    assert_array_equal(rl.group_advantages([1, 1, 1, 1], 1e-4), [0.] * 4)


def test_advantages_balanced():
    assert_allclose(rl.group_advantages([1, 1, 0, 0], 1e-14),
                    [1., 1., -1., -1.], rtol=1e-10)


def test_advantages_single_success():
    std = numpy.sqrt(.1875)
    expected = (numpy.array([1., 0., 0., 0.]) - .25) / (std + 1e-4)
    assert_allclose(rl.group_advantages([1, 0, 0, 0], 1e-4), expected,
                    rtol=1e-10)
    assert rl.group_advantages([1, 0, 0, 0], 1e-4)[0] == pytest.approx(
        .75 / (0.4330127018922193 + 1e-4), rel=1e-10)


def test_advantages_small_group():
    with pytest.raises(ConfigError):
        rl.group_advantages([1.], 1e-4)


# -- rollouts -----------------------------------------------------------------

def test_sample_rollouts_deterministic(tiny_policy):
    problems = generate_problems(0, 3)
    cfg = _config()
    a = rl.sample_rollouts(tiny_policy, MixSpec(), problems, cfg)
    b = rl.sample_rollouts(tiny_policy, MixSpec(), problems, cfg)
    assert [g.responses for g in a] == [g.responses for g in b]
    c = rl.sample_rollouts(tiny_policy, MixSpec(), problems, cfg,
                           iteration=1)
    assert [g.responses for g in a] != [g.responses for g in c]


def test_sample_rollouts_shapes(tiny_policy, tiny_reference):
    problems = generate_problems(1, 5)
    cfg = _config(group_size=3, max_response_len=4)
    mix = MixSpec(LOGIT, .5, tiny_reference)
    groups = rl.sample_rollouts(tiny_policy, mix, problems, cfg)
    assert len(groups) == 5
    for problem, group in zip(problems, groups):
        assert group.problem == problem
        assert len(group) == 3
        assert group.rewards.shape == group.advantages.shape == (3,)
        for response in group.responses:
            assert 1 <= len(response) <= 4
            assert response[-1] == EOS or len(response) == 4
            assert EOS not in response[:-1]


def test_sample_rollouts_eos_policy():
    logits = numpy.zeros(VOCAB_SIZE)
    logits[EOS] = 20.
    policy = constant_policy(logits)
    groups = rl.sample_rollouts(policy, MixSpec(), generate_problems(2, 4),
                                _config())
    for group in groups:
        assert group.responses == [(EOS,)] * 4
        assert_array_equal(group.rewards, 0.)
        assert_array_equal(group.advantages, 0.)


def test_old_logprobs_match_recomputation(tiny_policy, tiny_reference):
    problems = generate_problems(3, 4)
    mix = MixSpec(PROB, .3, tiny_reference)
    groups = rl.sample_rollouts(tiny_policy, mix, problems, _config())
    for group in groups:
        prompt = list(group.problem.prompt)
        for i, response in enumerate(group.responses):
            assert len(group.old_logprobs[i]) == len(response)
            assert group.old_logprobs[i].sum() == pytest.approx(
                sequence_logprob(tiny_policy, mix, prompt, response),
                abs=1e-10)
            for t, token in enumerate(response):
                expected = numpy.log(mixed_token_dist(
                    tiny_policy, mix, prompt + list(response[:t]))[token])
                assert abs(group.old_logprob(i, t) - expected) <= 1e-10


def test_parallel_sampling_matches_serial(tiny_policy):
    problems = generate_problems(4, 4)
    serial = rl.sample_rollouts(tiny_policy, MixSpec(), problems,
                                _config(nproc=1))
    parallel = rl.sample_rollouts(tiny_policy, MixSpec(), problems,
                                  _config(nproc=2))
    assert [g.responses for g in serial] == [g.responses for g in parallel]


# -- importance ratio ---------------------------------------------------------

def test_ratio_at_snapshot(tiny_policy, tiny_reference):
    mix = MixSpec(LOGIT, .5, tiny_reference)
    groups = rl.sample_rollouts(tiny_policy.snapshot(), mix,
                                generate_problems(5, 2), _config())
    for group in groups:
        for i, response in enumerate(group.responses):
            for t in range(len(response)):
                assert rl.importance_ratio(tiny_policy, mix, group, i, t) == \
                    pytest.approx(1., abs=1e-12)


def test_ratio_full_reference(tiny_policy, tiny_reference):
    mix = MixSpec(LOGIT, 1., tiny_reference)
    groups = rl.sample_rollouts(tiny_policy.snapshot(), mix,
                                generate_problems(5, 2), _config())
    for tensor in tiny_policy.parameters():
        tensor.data += .5
    for group in groups:
        for i, response in enumerate(group.responses):
            for t in range(len(response)):
                assert rl.importance_ratio(tiny_policy, mix, group, i, t) == \
                    pytest.approx(1., abs=1e-12)


def test_ratio_hand_set(tiny_policy, tiny_reference):
    mix = MixSpec(LOGIT, .25, tiny_reference)
    problem = make_problem(3, '+', 4)
    prompt = list(problem.prompt)
    responses = [(15, 7), (7, EOS)]
    old = tiny_policy.snapshot()
    group = _group(old, mix, problem, responses, [1., -1.])
    for tensor in tiny_policy.parameters():
        tensor.data *= 1.5
    for i, response in enumerate(responses):
        for t, token in enumerate(response):
            context = prompt + list(response[:t])
            expected = numpy.exp(
                numpy.log(mixed_token_dist(tiny_policy, mix, context)[token])
                - numpy.log(mixed_token_dist(old, mix, context)[token]))
            assert rl.importance_ratio(tiny_policy, mix, group, i, t) == \
                pytest.approx(expected, rel=1e-10)


def test_ratio_missing_logprob(tiny_policy):
    group = rl.RolloutGroup(make_problem(1, '+', 1), [(EOS,), (EOS,)],
                            [0, 0], [0., 0.])
    with pytest.raises(ContractError):
        rl.importance_ratio(tiny_policy, MixSpec(), group, 0, 0)
    with pytest.raises(ContractError):
        rl.surrogate_objective(tiny_policy, MixSpec(), [group], _config())


# -- surrogate ----------------------------------------------------------------

def test_surrogate_at_snapshot(tiny_policy, tiny_reference):
    mix = MixSpec(LOGIT, .5, tiny_reference)
    problem = make_problem(6, '+', 2)
    responses = [(15, 8, 16, EOS), (8, EOS), (EOS,)]
    advantages = [1.2, -.3, -.9]
    group = _group(tiny_policy, mix, problem, responses, advantages)
    objective, stats = rl._surrogate(tiny_policy, mix, [group], _config())
    expected = (4 * 1.2 - 2 * .3 - .9) / 7.
    assert objective.item() == pytest.approx(expected, abs=1e-12)
    assert stats['n_tokens'] == 7
    assert stats['clip_fraction'] == 0.
    assert stats['max_ratio_deviation'] <= 1e-12
    assert stats['kl'] is None


@pytest.mark.parametrize('ratio, advantage, expected', [
    (1.5, 1., 1.2),
    (.5, -1., -.8),
    (1.1, 1., 1.1),
    (.5, 1., .5),
])
def test_clipped_term(tiny_policy, ratio, advantage, expected):
    mix = MixSpec()
    problem = make_problem(2, '+', 2)
    responses = [(4,), (5,)]
    group = _group(tiny_policy, mix, problem, responses,
                   [advantage, advantage])
    group.old_logprobs = [lp - numpy.log(ratio) for lp in group.old_logprobs]
    objective = rl.surrogate_objective(tiny_policy, mix, [group], _config())
    assert objective.item() == pytest.approx(expected, abs=1e-12)


def test_surrogate_empty(tiny_policy):
    with pytest.raises(ConfigError):
        rl.surrogate_objective(tiny_policy, MixSpec(), [], _config())


def test_surrogate_kl_needs_reference(tiny_policy):
    mix = MixSpec()
    group = _group(tiny_policy, mix, make_problem(1, '+', 1), [(2,), (3,)],
                   [1., -1.])
    with pytest.raises(ConfigError):
        rl.surrogate_objective(tiny_policy, mix, [group],
                               _config(kl_beta=.01))


def test_surrogate_kl_zero_at_reference(tiny_policy):
    mix = MixSpec(NONE, reference=tiny_policy.snapshot())
    group = _group(tiny_policy, mix, make_problem(1, '+', 1), [(2,), (3,)],
                   [1., -1.])
    _, stats = rl._surrogate(tiny_policy, mix, [group], _config(kl_beta=.01))
    assert abs(stats['kl']) <= 1e-12


@pytest.mark.parametrize('mix_args, kl_beta', [
    ((NONE, 0.), 0.),
    ((LOGIT, .5), 0.),
    ((PROB, .3), 0.),
    ((LOGIT, .5), .1),
])
def test_surrogate_gradient(mix_args, kl_beta):
    policy = init_policy(VOCAB_SIZE, width=4, max_len=12, depth=1, seed=9)
    reference = init_policy(VOCAB_SIZE, width=4, max_len=12, depth=1,
                            seed=10).snapshot()
    mix = MixSpec(mix_args[0], mix_args[1], reference)
    cfg = _config(kl_beta=kl_beta)
    old = policy.snapshot()
    groups = [
        _group(old, mix, make_problem(3, '+', 5), [(15, 8, 16, EOS), (8,)],
               [1., -1.]),
        _group(old, mix, make_problem(9, '+', 9), [(1, 8, EOS), (EOS,)],
               [-.5, .5]),
    ]
    rng = numpy.random.default_rng(0)
    for tensor in policy.parameters():
        tensor.data += rng.uniform(-.01, .01, size=tensor.shape)

    objective, stats = rl._surrogate(policy, mix, groups, cfg)
    assert stats['max_ratio_deviation'] < .1
    ndgrad.backward(objective)

    step = 1e-5
    with ndgrad.no_grad():
        for tensor in policy.parameters():
            numeric = numpy.zeros_like(tensor.data)
            for idx in numpy.ndindex(*tensor.shape):
                orig = tensor.data[idx]
                tensor.data[idx] = orig + step
                up = rl.surrogate_objective(policy, mix, groups, cfg).item()
                tensor.data[idx] = orig - step
                down = rl.surrogate_objective(policy, mix, groups, cfg).item()
                tensor.data[idx] = orig
                numeric[idx] = (up - down) / (2 * step)
            scale = numpy.maximum(numpy.abs(tensor.grad), numpy.abs(numeric))
            assert (numpy.abs(tensor.grad - numeric) <=
                    1e-3 * scale + 1e-8).all()


# -- training loop ------------------------------------------------------------

def test_run_grpo_no_iterations(tiny_policy):
    policy, records = rl.run_grpo(tiny_policy, MixSpec(),
                                  generate_problems(0, 4),
                                  _config(iterations=0))
    assert records == []
    assert policy.checksum() == tiny_policy.checksum()
    assert policy is not tiny_policy


def test_run_grpo_frozen_base(tiny_reference):
    with pytest.raises(ContractError):
        rl.run_grpo(tiny_reference, MixSpec(), generate_problems(0, 4),
                    _config())


def test_run_grpo_records(tiny_policy, tiny_reference):
    data = generate_problems(0, 20)
    mix = MixSpec(LOGIT, .5, tiny_reference)
    seen = []

    def hook(iteration, policy, mix, record):
        seen.append(iteration)
        record['extra'] = iteration * 2

    checksum = tiny_policy.checksum()
    policy, records = rl.run_grpo(tiny_policy, mix, data, _config(),
                                  hooks=[hook])
    assert tiny_policy.checksum() == checksum
    assert seen == [0, 1, 2]
    assert [r['iteration'] for r in records] == [0, 1, 2]
    for record in records:
        assert set(record) >= {
            'schema', 'iteration', 'mean_reward', 'mean_abs_advantage',
            'clip_fraction', 'max_ratio_deviation', 'alpha', 'kl',
            'objective', 'n_tokens', 'n_groups', 'wall_time'}
        assert record['alpha'] == .5
        assert record['kl'] is None
        assert record['n_groups'] == 4
        assert record['extra'] == 2 * record['iteration']
        assert 0. <= record['mean_reward'] <= 1.


def test_run_grpo_deterministic(tiny_policy, tiny_reference):
    data = generate_problems(0, 20)
    mix = MixSpec(PROB, .5, tiny_reference)
    a, ra = rl.run_grpo(tiny_policy, mix, data, _config())
    b, rb = rl.run_grpo(tiny_policy, mix, data, _config())
    assert _strip(ra) == _strip(rb)
    assert a.checksum() == b.checksum()


def test_run_grpo_alpha_one_is_frozen(tiny_policy, tiny_reference):
    mix = MixSpec(LOGIT, 1., tiny_reference)
    policy, records = rl.run_grpo(tiny_policy, mix, generate_problems(0, 20),
                                  _config(iterations=5, learning_rate=5.))
    assert len(records) == 5
    assert policy.checksum() == tiny_policy.checksum()


def test_run_grpo_alpha_zero_matches_unmixed(tiny_policy, tiny_reference):
    data = generate_problems(1, 20)
    cfg = _config(iterations=4, learning_rate=1.)
    mixed, mixed_records = rl.run_grpo(
        tiny_policy, MixSpec(LOGIT, 0., tiny_reference), data, cfg)
    plain, plain_records = rl.run_grpo(tiny_policy, MixSpec(), data, cfg)
    assert _strip(mixed_records) == _strip(plain_records)
    assert mixed.checksum() == plain.checksum()


def test_run_grpo_kl(tiny_policy, tiny_reference):
    mix = MixSpec(NONE, reference=tiny_reference)
    _, records = rl.run_grpo(tiny_policy, mix, generate_problems(0, 20),
                             _config(kl_beta=.01, iterations=2))
    assert all(r['kl'] > 0 for r in records)


def test_run_grpo_drop_zero_variance():
    policy = init_policy(VOCAB_SIZE, width=4, zero=True)
    policy, records = rl.run_grpo(policy, MixSpec(), generate_problems(0, 8),
                                  _config(drop_zero_variance=True,
                                          iterations=2))
    assert [r['n_groups'] for r in records] == [0, 0]
    assert [r['n_tokens'] for r in records] == [0, 0]
    assert not any(t.data.any() for t in policy.parameters())


@pytest.mark.parametrize('scheme', [NONE, LOGIT, PROB])
def test_constant_rewards_leave_policy_unchanged(scheme):
    logits = numpy.zeros(VOCAB_SIZE)
    logits[EOS] = 30.
    policy = constant_policy(logits, trainable=True)
    if scheme == NONE:
        mix = MixSpec()
    else:
        mix = MixSpec(scheme, .5, constant_policy(logits))
    cfg = _config(inner_epochs=2, learning_rate=5.)
    data = generate_problems(0, 8)
    groups = rl.sample_rollouts(policy.snapshot(), mix, data[:4], cfg)
    for group in groups:
        assert not group.rewards.any()
        assert not numpy.any(group.advantages)
    ndgrad.backward(rl.surrogate_objective(policy, mix, groups, cfg))
    for tensor in policy.parameters():
        assert not tensor.grad.any()
    policy.zero_grad()
    trained, records = rl.run_grpo(policy, mix, data, cfg)
    assert trained.checksum() == policy.checksum()
    assert [r['mean_abs_advantage'] for r in records] == [0.] * 3
    assert [r['n_groups'] for r in records] == [4] * 3


@pytest.mark.parametrize('scheme', [LOGIT, PROB])
def test_ratios_start_at_one_every_iteration(tiny_policy, tiny_reference,
                                             scheme):
    mix = MixSpec(scheme, .4, tiny_reference)
    cfg = _config(iterations=4, inner_epochs=3, learning_rate=.5, kl_beta=.5)
    policy, records = rl.run_grpo(tiny_policy, mix, generate_problems(2, 20),
                                  cfg)
    assert policy.checksum() != tiny_policy.checksum()
    assert len(records) == 4
    for record in records:
        assert record['n_tokens'] > 0
        assert record['max_ratio_deviation'] <= 1e-10
