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

"""Dense 64-bit arrays with reverse-mode automatic differentiation

The graph is rebuilt on every forward pass: each operation applied to a
`Tensor` that requires a gradient records its operands and an adjoint
rule, and `backward` walks the recorded nodes in reverse topological
order.

Broadcasting is limited to adding a bias vector over the last axis, and to
python scalars; any other shape mismatch raises `~mixgrpo.errors.ShapeError`.
"""

import threading
from contextlib import contextmanager

import numpy
from scipy.special import (logsumexp, softmax as _softmax)

from .errors import (DomainError, NumericalError, ShapeError)

__all__ = ['Tensor', 'parameter', 'constant', 'no_grad', 'is_grad_enabled',
           'add', 'sub', 'mul', 'neg', 'matmul', 'dot', 'tanh', 'exp', 'log',
           'sum', 'mean', 'softmax', 'log_softmax', 'take', 'pick',
           'segment_mean', 'concat', 'minimum', 'logaddexp', 'clip',
           'backward', 'zero_grad']

DTYPE = numpy.float64

_STATE = threading.local()


# -- grad mode ----------------------------------------------------------------

def is_grad_enabled():
    """Return `True` if operations are currently being recorded
    """
    return getattr(_STATE, 'enabled', True)


@contextmanager
def no_grad():
    """Context manager that disables graph recording in this thread
    """
    previous = is_grad_enabled()
    _STATE.enabled = False
    try:
        yield
    finally:
        _STATE.enabled = previous


# -- tensor -------------------------------------------------------------------

class Tensor(object):
    """A dense row-major array of 64-bit floats

    Parameters
    ----------
    data : `array_like`
        the values of this tensor, every dimension must be positive
    requires_grad : `bool`, optional
        if `True` this tensor is a leaf whose gradient is accumulated
        by `backward`, default: `False`

    Notes
    -----
    Only leaves carry a ``grad`` buffer. Intermediate results take part in
    the graph but their adjoints are discarded once `backward` returns.
    """
    __slots__ = ('data', 'requires_grad', 'grad', '_parents', '_adjoint',
                 'op')

    def __init__(self, data, requires_grad=False, _parents=(), _adjoint=None,
                 op='leaf'):
        data = numpy.asarray(data, dtype=DTYPE)
        if any(dim < 1 for dim in data.shape):
            raise ShapeError("tensor dimensions must be positive, got %s"
                             % (data.shape,))
        self.data = data
        self.requires_grad = bool(requires_grad)
        self._parents = tuple(_parents)
        self._adjoint = _adjoint
        self.op = op
        if self.requires_grad and self._adjoint is None:
            self.grad = numpy.zeros_like(data)
        else:
            self.grad = None

    @property
    def shape(self):
        """Shape of this tensor

        :type: `tuple` of `int`
        """
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self._adjoint is None

    def item(self):
        """Return the value of a single-element tensor as a `float`
        """
        if self.size != 1:
            raise ShapeError("only single-element tensors can be converted "
                             "to a scalar, got shape %s" % (self.shape,))
        return float(self.data.reshape(()))

    def numpy(self):
        """Return a copy of the data as a `numpy.ndarray`
        """
        return self.data.copy()

    def detach(self):
        """Return a constant tensor sharing this tensor's values
        """
        return Tensor(self.data)

    def __repr__(self):
        return '<Tensor(shape={0}, op={1!r}, requires_grad={2})>'.format(
            self.shape, self.op, self.requires_grad)

    def __len__(self):
        return self.shape[0]

    # arithmetic sugar

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return add(neg(self), other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __truediv__(self, other):
        if not numpy.isscalar(other):
            raise ShapeError("tensors can only be divided by a scalar")
        return mul(self, 1. / other)


def parameter(data):
    """Create a leaf `Tensor` that requires a gradient
    """
    return Tensor(numpy.array(data, dtype=DTYPE), requires_grad=True)


def constant(data):
    """Create a `Tensor` that never requires a gradient
    """
    return Tensor(data)


def _as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _result(data, parents, adjoint, op):
    """Build the output of an operation, recording it when needed
    """
    data = numpy.asarray(data, dtype=DTYPE)
    if not numpy.isfinite(data).all():
        raise NumericalError("non-finite value produced by %r" % op)
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, _parents=parents,
                      _adjoint=adjoint, op=op)
    return Tensor(data, op=op)


# -- elementwise --------------------------------------------------------------

def add(a, b):
    """Element-wise sum, or add a bias vector over the last axis
    """
    a = _as_tensor(a)
    if numpy.isscalar(b):
        return _result(a.data + b, (a,), lambda g: (g,), 'add')
    b = _as_tensor(b)
    if a.shape == b.shape:
        return _result(a.data + b.data, (a, b), lambda g: (g, g), 'add')
    if b.ndim == 1 and a.ndim > 1 and a.shape[-1] == b.shape[0]:
        axes = tuple(range(a.ndim - 1))
        return _result(a.data + b.data, (a, b),
                       lambda g: (g, g.sum(axis=axes)), 'add-bias')
    raise ShapeError("cannot add shapes %s and %s" % (a.shape, b.shape))


def neg(a):
    return _result(-a.data, (a,), lambda g: (-g,), 'neg')


def sub(a, b):
    """Element-wise difference
    """
    if numpy.isscalar(b):
        return add(a, -b)
    a = _as_tensor(a)
    b = _as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError("cannot subtract shapes %s and %s"
                         % (a.shape, b.shape))
    return _result(a.data - b.data, (a, b), lambda g: (g, -g), 'sub')


def mul(a, b):
    """Element-wise product, or scale by a python scalar
    """
    a = _as_tensor(a)
    if numpy.isscalar(b):
        return _result(a.data * b, (a,), lambda g: (g * b,), 'scale')
    b = _as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError("cannot multiply shapes %s and %s"
                         % (a.shape, b.shape))
    return _result(a.data * b.data, (a, b),
                   lambda g: (g * b.data, g * a.data), 'mul')


def tanh(a):
    out = numpy.tanh(a.data)
    return _result(out, (a,), lambda g: (g * (1. - out * out),), 'tanh')


def exp(a):
    out = numpy.exp(a.data)
    return _result(out, (a,), lambda g: (g * out,), 'exp')


def log(a):
    """Natural logarithm of a strictly positive tensor
    """
    if (a.data <= 0).any():
        raise DomainError("log is undefined for non-positive values")
    return _result(numpy.log(a.data), (a,), lambda g: (g / a.data,), 'log')


def minimum(a, b):
    """Element-wise minimum; ties send the adjoint to ``a``
    """
    a = _as_tensor(a)
    b = _as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError("cannot compare shapes %s and %s"
                         % (a.shape, b.shape))
    left = a.data <= b.data
    return _result(numpy.where(left, a.data, b.data), (a, b),
                   lambda g: (g * left, g * ~left), 'minimum')


def logaddexp(a, b):
    """Element-wise ``log(exp(a) + exp(b))`` without forming the
    exponentials
    """
    a = _as_tensor(a)
    b = _as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError("cannot combine shapes %s and %s"
                         % (a.shape, b.shape))
    out = numpy.logaddexp(a.data, b.data)
    return _result(out, (a, b),
                   lambda g: (g * numpy.exp(a.data - out),
                              g * numpy.exp(b.data - out)), 'logaddexp')


def clip(a, low, high):
    """Clamp values into ``[low, high]``; the adjoint is zero outside
    """
    inside = (a.data >= low) & (a.data <= high)
    return _result(numpy.clip(a.data, low, high), (a,),
                   lambda g: (g * inside,), 'clip')


# -- reductions ---------------------------------------------------------------

def sum(a, axis=None):  # noqa: A001
    """Sum all values, or the values along the last axis
    """
    if axis is None:
        return _result(a.data.sum(), (a,),
                       lambda g: (numpy.full(a.shape, g),), 'sum')
    if axis not in (-1, a.ndim - 1):
        raise ShapeError("sum only reduces over the last axis")
    return _result(a.data.sum(axis=-1), (a,),
                   lambda g: (numpy.repeat(g[..., None], a.shape[-1],
                                           axis=-1),), 'sum-last')


def mean(a):
    """Mean of all values
    """
    n = a.size
    return _result(a.data.mean(), (a,),
                   lambda g: (numpy.full(a.shape, g / n),), 'mean')


def dot(a, b):
    """Inner product of two vectors of equal length
    """
    if a.ndim != 1 or a.shape != _as_tensor(b).shape:
        raise ShapeError("dot needs two vectors of equal length")
    return sum(mul(a, b))


# -- linear algebra -----------------------------------------------------------

def matmul(a, b):
    """Matrix product of ``a`` (m x k) and ``b`` (k x n)
    """
    a = _as_tensor(a)
    b = _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("matmul needs two matrices, got %s and %s"
                         % (a.shape, b.shape))
    if a.shape[1] != b.shape[0]:
        raise ShapeError("inner dimensions differ: %s x %s"
                         % (a.shape, b.shape))
    return _result(a.data @ b.data, (a, b),
                   lambda g: (g @ b.data.T, a.data.T @ g), 'matmul')


def concat(tensors, axis=-1):
    """Join matrices along their last axis
    """
    tensors = [_as_tensor(t) for t in tensors]
    if axis not in (-1, 1) or any(t.ndim != 2 for t in tensors):
        raise ShapeError("concat joins matrices along the last axis")
    rows = set(t.shape[0] for t in tensors)
    if len(rows) != 1:
        raise ShapeError("cannot concatenate matrices with %d different "
                         "row counts" % len(rows))
    bounds = numpy.cumsum([t.shape[1] for t in tensors])[:-1]
    return _result(numpy.concatenate([t.data for t in tensors], axis=1),
                   tuple(tensors),
                   lambda g: tuple(numpy.split(g, bounds, axis=1)), 'concat')


# -- indexing -----------------------------------------------------------------

def take(table, indices):
    """Gather rows of a matrix (an embedding lookup)
    """
    indices = numpy.asarray(indices, dtype=int)
    if table.ndim != 2 or indices.ndim != 1:
        raise ShapeError("take gathers rows of a matrix by a vector of ids")

    def adjoint(g):
        out = numpy.zeros_like(table.data)
        numpy.add.at(out, indices, g)
        return (out,)

    return _result(table.data[indices], (table,), adjoint, 'take')


def pick(a, indices):
    """Select one element per row: ``out[i] = a[i, indices[i]]``
    """
    indices = numpy.asarray(indices, dtype=int)
    if a.ndim != 2 or indices.shape != (a.shape[0],):
        raise ShapeError("pick needs a matrix and one column id per row")
    rows = numpy.arange(a.shape[0])

    def adjoint(g):
        out = numpy.zeros_like(a.data)
        out[rows, indices] = g
        return (out,)

    return _result(a.data[rows, indices], (a,), adjoint, 'pick')


def segment_mean(a, lengths):
    """Average consecutive row segments of a matrix

    Parameters
    ----------
    a : `Tensor`
        matrix of shape ``(sum(lengths), d)``
    lengths : `list` of `int`
        the (positive) number of rows in each segment

    Returns
    -------
    means : `Tensor`
        matrix of shape ``(len(lengths), d)``
    """
    lengths = numpy.asarray(lengths, dtype=int)
    if a.ndim != 2 or lengths.sum() != a.shape[0] or (lengths < 1).any():
        raise ShapeError("segment lengths do not partition the rows")
    starts = numpy.concatenate(([0], numpy.cumsum(lengths)[:-1]))
    out = numpy.add.reduceat(a.data, starts, axis=0) / lengths[:, None]
    return _result(out, (a,),
                   lambda g: (numpy.repeat(g / lengths[:, None], lengths,
                                           axis=0),), 'segment-mean')


# -- distributions ------------------------------------------------------------

def softmax(z):
    """Softmax over the last axis
    """
    z = _as_tensor(z)
    out = _softmax(z.data, axis=-1)

    def adjoint(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return _result(out, (z,), adjoint, 'softmax')


def log_softmax(z):
    """Log of the softmax over the last axis
    """
    z = _as_tensor(z)
    out = z.data - logsumexp(z.data, axis=-1, keepdims=True)
    probs = numpy.exp(out)

    def adjoint(g):
        return (g - probs * g.sum(axis=-1, keepdims=True),)

    return _result(out, (z,), adjoint, 'log-softmax')


# -- backward -----------------------------------------------------------------

def _toposort(root):
    """Return the nodes above ``root`` with every node after its operands
    """
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        stack.extend((p, False) for p in node._parents
                     if p.requires_grad and id(p) not in seen)
    return order


def backward(loss):
    """Accumulate the gradient of a scalar into every leaf above it

    Parameters
    ----------
    loss : `Tensor`
        a single-element tensor at the root of a recorded graph

    Notes
    -----
    Leaf gradients accumulate across calls; use `zero_grad` to reset them.
    """
    if loss.size != 1:
        raise ShapeError("backward needs a scalar root, got shape %s"
                         % (loss.shape,))
    if not loss.requires_grad:
        return
    adjoints = {id(loss): numpy.ones_like(loss.data)}
    for node in reversed(_toposort(loss)):
        g = adjoints.pop(id(node), None)
        if g is None:
            continue
        if node.is_leaf:
            node.grad += g
            continue
        for parent, pg in zip(node._parents, node._adjoint(g)):
            if not parent.requires_grad:
                continue
            if id(parent) in adjoints:
                adjoints[id(parent)] = adjoints[id(parent)] + pg
            else:
                adjoints[id(parent)] = pg
    for leaf in _toposort(loss):
        if leaf.is_leaf and not numpy.isfinite(leaf.grad).all():
            raise NumericalError("non-finite gradient accumulated")


def zero_grad(tensors):
    """Reset the gradient buffers of the given leaves
    """
    for tensor in tensors:
        if tensor.grad is not None:
            tensor.grad[...] = 0.
