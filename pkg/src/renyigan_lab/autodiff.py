"""Tape-based reverse-mode differentiation over dense numpy tensors.

Every operation appends a :class:`Node` to the :class:`Tape` that owns its
inputs, so the tape order is already a topological order and the reverse pass
is a single backwards sweep.

    >>> tape = Tape()
    >>> w = tape.leaf(3.0)
    >>> tape.backward(w * w, [w])[0]
    array(6.)
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonScalarOutput, ShapeMismatch


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Node:
    __slots__ = ("tape", "index", "value", "parents", "vjp", "needs_grad", "name")
    # make ``ndarray op Node`` fall through to the reflected Node methods
    __array_ufunc__ = None

    def __init__(self, tape, value, parents=(), vjp=None, needs_grad=False, name=None):
        self.tape = tape
        self.value = value
        self.parents = parents
        self.vjp = vjp
        self.needs_grad = needs_grad
        self.name = name
        self.index = len(tape.nodes)
        tape.nodes.append(self)

    @property
    def shape(self) -> tuple:
        return self.value.shape

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Node{label} #{self.index} shape={self.shape}>"

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(self.tape.lift(other)))

    def __rsub__(self, other):
        return add(self.tape.lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self.tape.lift(other)
        return mul(self, power(other, -1.0))

    def __rtruediv__(self, other):
        return mul(self.tape.lift(other), power(self, -1.0))

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(self.tape.lift(other), self)


class Tape:
    """Append-only record of a computation."""

    def __init__(self):
        self.nodes: list[Node] = []

    def leaf(self, value, name=None) -> Node:
        """A differentiable input (parameter or data point)."""
        return Node(self, np.array(value, dtype=float), needs_grad=True, name=name)

    def constant(self, value, name=None) -> Node:
        return Node(self, np.array(value, dtype=float), name=name)

    def lift(self, x) -> Node:
        if isinstance(x, Node):
            if x.tape is not self:
                raise ValueError("node belongs to a different tape")
            return x
        return self.constant(x)

    def op(self, value, parents: Sequence[Node], vjp: Callable) -> Node:
        needs = any(p.needs_grad for p in parents)
        return Node(self, value, tuple(parents), vjp if needs else None, needs)

    def backward(self, output: Node, wrt: Iterable[Node]) -> list[np.ndarray]:
        """Gradients of a scalar ``output`` with respect to each node in ``wrt``.

        Nodes the output does not depend on receive exact zeros.
        """
        if output.value.size != 1:
            raise NonScalarOutput(f"backward needs a scalar output, got shape {output.shape}")
        wrt = list(wrt)
        grads: dict[int, np.ndarray] = {output.index: np.ones_like(output.value)}
        for node in reversed(self.nodes[: output.index + 1]):
            g = grads.get(node.index)
            if g is None or node.vjp is None:
                continue
            for parent, pg in zip(node.parents, node.vjp(g)):
                if not parent.needs_grad:
                    continue
                if parent.index in grads:
                    grads[parent.index] = grads[parent.index] + pg
                else:
                    grads[parent.index] = pg
        out = []
        for w in wrt:
            g = grads.get(w.index)
            out.append(np.zeros_like(w.value) if g is None else np.asarray(g, dtype=float).reshape(w.shape))
        return out


# operations -----------------------------------------------------------------

def _pair(a, b):
    tape = a.tape if isinstance(a, Node) else b.tape
    return tape, tape.lift(a), tape.lift(b)


def add(a, b) -> Node:
    tape, a, b = _pair(a, b)
    sa, sb = a.shape, b.shape
    return tape.op(a.value + b.value, (a, b),
                   lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def neg(a: Node) -> Node:
    return a.tape.op(-a.value, (a,), lambda g: (-g,))


def mul(a, b) -> Node:
    tape, a, b = _pair(a, b)
    av, bv = a.value, b.value
    return tape.op(av * bv, (a, b),
                   lambda g: (_unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)))


def power(a: Node, exponent: float) -> Node:
    """Elementwise ``a ** exponent`` for a constant real exponent."""
    exponent = float(exponent)
    av = a.value
    out = av ** exponent
    return a.tape.op(out, (a,), lambda g: (g * exponent * av ** (exponent - 1.0),))


def matmul(a, b) -> Node:
    tape, a, b = _pair(a, b)
    if a.value.ndim != 2 or b.value.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
    av, bv = a.value, b.value
    return tape.op(av @ bv, (a, b), lambda g: (g @ bv.T, av.T @ g))


def exp(a: Node) -> Node:
    out = np.exp(a.value)
    return a.tape.op(out, (a,), lambda g: (g * out,))


def log(a: Node) -> Node:
    av = a.value
    return a.tape.op(np.log(av), (a,), lambda g: (g / av,))


def abs_(a: Node) -> Node:
    """|a| with derivative sign(a) (0 at 0)."""
    av = a.value
    return a.tape.op(np.abs(av), (a,), lambda g: (g * np.sign(av),))


def sigmoid(a: Node) -> Node:
    out = _sigmoid(a.value)
    return a.tape.op(out, (a,), lambda g: (g * out * (1.0 - out),))


def tanh(a: Node) -> Node:
    out = np.tanh(a.value)
    return a.tape.op(out, (a,), lambda g: (g * (1.0 - out * out),))


def leaky_relu(a: Node, slope: float) -> Node:
    slopes = leaky_relu_slopes(a.value, slope)
    return a.tape.op(a.value * slopes, (a,), lambda g: (g * slopes,))


def leaky_relu_slopes(x: np.ndarray, slope: float) -> np.ndarray:
    """Derivative of leaky_relu; the kink at 0 takes the positive-side slope 1."""
    return np.where(x >= 0, 1.0, slope)


def clip(a: Node, lo: float, hi: float) -> Node:
    av = a.value
    inside = (av >= lo) & (av <= hi)
    return a.tape.op(np.clip(av, lo, hi), (a,), lambda g: (g * inside,))


def total(a: Node) -> Node:
    """Sum of all entries (scalar node)."""
    shape = a.shape
    return a.tape.op(np.array(a.value.sum()), (a,), lambda g: (np.broadcast_to(g, shape),))


def mean(a: Node) -> Node:
    n = a.value.size
    shape = a.shape
    return a.tape.op(np.array(a.value.mean()), (a,), lambda g: (np.broadcast_to(g / n, shape),))


def sum_axis(a: Node, axis: int) -> Node:
    shape = a.shape
    return a.tape.op(a.value.sum(axis=axis), (a,),
                     lambda g: (np.broadcast_to(np.expand_dims(g, axis), shape),))


def reshape(a: Node, shape) -> Node:
    old = a.shape
    return a.tape.op(a.value.reshape(shape), (a,), lambda g: (g.reshape(old),))


def take(a: Node, index) -> Node:
    """``a.value[index]`` with the gradient scattered back."""
    shape = a.shape

    def vjp(g):
        out = np.zeros(shape)
        np.add.at(out, index, g)
        return (out,)

    return a.tape.op(a.value[index], (a,), vjp)


def detach(a: Node) -> Node:
    """Same value, no gradient flow."""
    return a.tape.constant(a.value)


def _sigmoid(x):
    # split form avoids overflow in exp for large |x|
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_value(x) -> np.ndarray:
    return _sigmoid(np.asarray(x, dtype=float))
