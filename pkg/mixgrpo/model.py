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

"""The autoregressive policy network and its optimizers

A `Policy` maps a context (a sequence of token ids) to a vector of logits
over the vocabulary. The network is

1. the mean over context positions of token embedding + position embedding,
2. concatenated with the embedding of the last context token,
3. followed by ``depth`` tanh layers of width ``width``,
4. projected (without bias) onto the vocabulary.
"""

import hashlib
from collections import OrderedDict

import numpy

from . import ndgrad
from .errors import (ContractError, InputError, ConfigError)

__all__ = ['PolicyParams', 'Policy', 'init_policy', 'logits', 'snapshot',
           'sgd_step', 'SGD', 'Adam', 'get_optimizer']

INIT_SCALE = 0.08


def _hidden(layer, kind):
    return 'hidden_{0}_{1}'.format(layer, kind)


class PolicyParams(object):
    """The named parameter tensors of a `Policy`

    Parameters
    ----------
    vocab_size : `int`
        number of symbols ``V``
    width : `int`
        hidden width ``d``
    max_len : `int`
        maximum context length ``L``
    tensors : `OrderedDict`
        the parameter tensors, keyed by name
    """
    __slots__ = ('vocab_size', 'width', 'max_len', 'tensors')

    def __init__(self, vocab_size, width, max_len, tensors):
        self.vocab_size = int(vocab_size)
        self.width = int(width)
        self.max_len = int(max_len)
        self.tensors = OrderedDict(tensors)

    @property
    def depth(self):
        """Number of hidden tanh layers

        :type: `int`
        """
        return sum(1 for name in self.tensors if name.endswith('_weight'))

    def __getitem__(self, name):
        return self.tensors[name]

    def __iter__(self):
        return iter(self.tensors)

    def items(self):
        return self.tensors.items()

    def copy(self, requires_grad=False):
        """Return a deep copy of these parameters
        """
        return type(self)(
            self.vocab_size, self.width, self.max_len,
            [(name, ndgrad.Tensor(t.data.copy(), requires_grad=requires_grad))
             for name, t in self.items()])

    def checksum(self):
        """Return a SHA-256 digest of every parameter value and shape
        """
        digest = hashlib.sha256()
        digest.update(('%d,%d,%d' % (self.vocab_size, self.width,
                                     self.max_len)).encode())
        for name, tensor in self.items():
            digest.update(name.encode())
            digest.update(str(tensor.shape).encode())
            digest.update(numpy.ascontiguousarray(tensor.data).tobytes())
        return digest.hexdigest()

    @classmethod
    def initialise(cls, vocab_size, width, max_len, depth=2, seed=0,
                   scale=INIT_SCALE, zero=False):
        """Create a new parameter set

        Values are drawn uniformly from ``[-scale, scale]`` with a
        generator seeded by ``seed``; ``zero=True`` gives all-zero values.
        """
        for key, value in (('vocab_size', vocab_size), ('width', width),
                           ('max_len', max_len), ('depth', depth)):
            if value < 1:
                raise ConfigError("%s must be positive, got %r"
                                  % (key, value))
        rng = numpy.random.default_rng(seed)
        shapes = [('token_embedding', (vocab_size, width)),
                  ('position_embedding', (max_len, width))]
        fan_in = 2 * width
        for layer in range(depth):
            shapes.append((_hidden(layer, 'weight'), (fan_in, width)))
            shapes.append((_hidden(layer, 'bias'), (width,)))
            fan_in = width
        shapes.append(('output_projection', (width, vocab_size)))

        tensors = []
        for name, shape in shapes:
            if zero:
                data = numpy.zeros(shape)
            else:
                data = rng.uniform(-scale, scale, size=shape)
            tensors.append((name, ndgrad.Tensor(data)))
        return cls(vocab_size, width, max_len, tensors)


class Policy(object):
    """A trainable or frozen autoregressive scorer

    Parameters
    ----------
    params : `PolicyParams`
        the network parameters
    trainable : `bool`, optional
        whether gradients are accumulated for these parameters,
        default: `True`
    """
    def __init__(self, params, trainable=True):
        self._params = params
        self._trainable = bool(trainable)
        for name, tensor in list(params.items()):
            if tensor.requires_grad != self._trainable:
                params.tensors[name] = ndgrad.Tensor(
                    tensor.data.copy(), requires_grad=self._trainable)

    # -------------------------------------------
    # Policy properties

    @property
    def params(self):
        """The parameters of this policy

        :type: `PolicyParams`
        """
        return self._params

    @property
    def trainable(self):
        """Whether this policy can be updated

        :type: `bool`
        """
        return self._trainable

    @property
    def vocab_size(self):
        return self._params.vocab_size

    @property
    def width(self):
        return self._params.width

    @property
    def max_len(self):
        return self._params.max_len

    @property
    def depth(self):
        return self._params.depth

    def parameters(self):
        """The list of parameter tensors
        """
        return list(self._params.tensors.values())

    def __repr__(self):
        return '<{0}(V={1}, d={2}, L={3}, depth={4}, {5})>'.format(
            type(self).__name__, self.vocab_size, self.width, self.max_len,
            self.depth, 'trainable' if self.trainable else 'frozen')

    # -------------------------------------------
    # Policy methods

    def check_contexts(self, contexts):
        """Validate a batch of contexts and return them as integer arrays

        Raises
        ------
        mixgrpo.errors.InputError
            if a context is empty, longer than ``max_len``, or contains
            an id outside the vocabulary
        """
        out = []
        for context in contexts:
            arr = numpy.asarray(context)
            if arr.ndim != 1 or arr.size == 0:
                raise InputError("contexts must be non-empty token sequences")
            if arr.size > self.max_len:
                raise InputError("context of length %d exceeds the maximum "
                                 "length %d" % (arr.size, self.max_len))
            if not numpy.issubdtype(arr.dtype, numpy.integer):
                raise InputError("token ids must be integers")
            if arr.min() < 0 or arr.max() >= self.vocab_size:
                raise InputError("token id outside vocabulary of size %d"
                                 % self.vocab_size)
            out.append(arr.astype(int))
        if not out:
            raise InputError("no contexts given")
        return out

    def forward(self, contexts):
        """Compute the logits for a batch of contexts

        Parameters
        ----------
        contexts : `list` of token sequences
            each context holds between 1 and ``max_len`` token ids

        Returns
        -------
        logits : `~mixgrpo.ndgrad.Tensor`
            matrix of shape ``(len(contexts), vocab_size)``; recorded for
            differentiation when this policy is trainable
        """
        contexts = self.check_contexts(contexts)
        params = self._params
        lengths = [c.size for c in contexts]
        tokens = numpy.concatenate(contexts)
        positions = numpy.concatenate([numpy.arange(n) for n in lengths])
        last = numpy.array([c[-1] for c in contexts])

        embedded = ndgrad.add(
            ndgrad.take(params['token_embedding'], tokens),
            ndgrad.take(params['position_embedding'], positions))
        hidden = ndgrad.concat([
            ndgrad.segment_mean(embedded, lengths),
            ndgrad.take(params['token_embedding'], last),
        ])
        for layer in range(params.depth):
            hidden = ndgrad.tanh(ndgrad.add(
                ndgrad.matmul(hidden, params[_hidden(layer, 'weight')]),
                params[_hidden(layer, 'bias')]))
        return ndgrad.matmul(hidden, params['output_projection'])

    def logits(self, context):
        """Return the logit vector for a single context
        """
        with ndgrad.no_grad():
            return self.forward([context]).data[0].copy()

    def probs(self, contexts):
        """Return next-token distributions for a batch of contexts
        """
        with ndgrad.no_grad():
            return ndgrad.softmax(self.forward(contexts)).data

    def copy(self, trainable=True):
        """Return a deep copy of this policy
        """
        return type(self)(self._params.copy(requires_grad=trainable),
                          trainable=trainable)

    def snapshot(self):
        """Return a frozen deep copy of this policy
        """
        return self.copy(trainable=False)

    def checksum(self):
        """Digest of the parameter values, see `PolicyParams.checksum`
        """
        return self._params.checksum()

    def zero_grad(self):
        ndgrad.zero_grad(self.parameters())

    def write(self, path, **metadata):
        """Write this policy to a checkpoint file

        See `mixgrpo.io.save_policy` for details.
        """
        from .io import save_policy
        return save_policy(self, path, **metadata)

    @classmethod
    def read(cls, path, trainable=False):
        """Read a policy from a checkpoint file

        See `mixgrpo.io.load_policy` for details.
        """
        from .io import load_policy
        return load_policy(path, trainable=trainable)


# -- module-level interface ---------------------------------------------------

def init_policy(vocab_size, width=48, max_len=16, depth=2, seed=0,
                trainable=True, zero=False):
    """Create a new randomly-initialised `Policy`
    """
    params = PolicyParams.initialise(vocab_size, width, max_len, depth=depth,
                                     seed=seed, zero=zero)
    return Policy(params, trainable=trainable)


def logits(policy, context):
    """Return the logit vector of ``policy`` at ``context``
    """
    return policy.logits(context)


def snapshot(policy):
    """Return a frozen deep copy of ``policy``
    """
    return policy.snapshot()


def _check_trainable(policy):
    if not policy.trainable:
        raise ContractError("cannot update a frozen policy")


def sgd_step(policy, learning_rate):
    """Apply ``params <- params - learning_rate * grad`` and clear the grads

    Raises
    ------
    mixgrpo.errors.ContractError
        if ``policy`` is frozen
    """
    _check_trainable(policy)
    if learning_rate <= 0:
        raise ConfigError("learning rate must be positive")
    for tensor in policy.parameters():
        tensor.data -= learning_rate * tensor.grad
        tensor.grad[...] = 0.


# -- optimizers ---------------------------------------------------------------

class SGD(object):
    """Plain stochastic gradient descent
    """
    name = 'sgd'

    def __init__(self, learning_rate):
        if learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        self.learning_rate = learning_rate

    def step(self, policy):
        sgd_step(policy, self.learning_rate)


class Adam(object):
    """Adam with bias correction; moments are keyed by parameter name
    """
    name = 'adam'

    def __init__(self, learning_rate, beta1=0.9, beta2=0.999, eps=1e-8):
        if learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self._moments = {}

    def step(self, policy):
        _check_trainable(policy)
        self.steps += 1
        correct1 = 1. - self.beta1 ** self.steps
        correct2 = 1. - self.beta2 ** self.steps
        for name, tensor in policy.params.items():
            g = tensor.grad
            m, v = self._moments.get(
                name, (numpy.zeros_like(g), numpy.zeros_like(g)))
            m = self.beta1 * m + (1. - self.beta1) * g
            v = self.beta2 * v + (1. - self.beta2) * g * g
            self._moments[name] = (m, v)
            tensor.data -= (self.learning_rate * (m / correct1)
                            / (numpy.sqrt(v / correct2) + self.eps))
            tensor.grad[...] = 0.


OPTIMIZERS = {
    SGD.name: SGD,
    Adam.name: Adam,
}


def get_optimizer(name, learning_rate):
    """Create the optimizer registered as ``name``
    """
    try:
        return OPTIMIZERS[name.lower()](learning_rate)
    except KeyError:
        raise ConfigError("unknown optimizer %r, choose one of: %s"
                          % (name, ', '.join(OPTIMIZERS)))
