"""Dense MLPs on top of :mod:`renyigan_lab.autodiff`, Adam, and checkpoints.

The forward pass can carry a tangent direction for the input alongside the
primal values.  The tangent of the logit is then an ordinary node of the
tape, so differentiating it with respect to the parameters gives the mixed
second derivative needed by the input-gradient penalty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .autodiff import Node, Tape
from .errors import CheckpointError, SaturatedDiscriminator, ShapeMismatch

ACTIVATIONS = ("leaky_relu", "tanh", "sigmoid", "identity")
CHECKPOINT_FORMAT = "renyigan-lab-mlp"
CHECKPOINT_VERSION = 1
INIT_STD = 0.01
SATURATION_EPS = 1e-12


@dataclass
class Layer:
    weight: np.ndarray  # (fan_in, fan_out), applied as x @ weight
    bias: np.ndarray | None
    activation: str = "identity"
    slope: float = 0.2  # leaky_relu only

    def __post_init__(self):
        self.weight = np.asarray(self.weight, dtype=float)
        if self.weight.ndim != 2:
            raise ShapeMismatch("layer weight must be a matrix")
        if self.bias is not None:
            self.bias = np.asarray(self.bias, dtype=float)
            if self.bias.shape != (self.weight.shape[1],):
                raise ShapeMismatch(f"bias shape {self.bias.shape} does not match {self.weight.shape}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass
class ForwardPass:
    tape: Tape
    params: list[Node]
    inputs: Node
    logit: Node  # pre-activation of the last layer
    output: Node
    tangent: Node | None = None  # directional derivative of the logit

    @property
    def value(self) -> np.ndarray:
        return self.output.value


class Mlp:
    """Feed-forward network of :class:`Layer` objects."""

    def __init__(self, layers: list[Layer]):
        if not layers:
            raise ValueError("an Mlp needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.weight.shape[1] != nxt.weight.shape[0]:
                raise ShapeMismatch(
                    f"layer dimensions do not chain: {prev.weight.shape} -> {nxt.weight.shape}")
        self.layers = layers

    @property
    def input_dim(self) -> int:
        return self.layers[0].weight.shape[0]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weight.shape[1]

    @property
    def is_discriminator(self) -> bool:
        return self.output_dim == 1 and self.layers[-1].activation == "sigmoid"

    @classmethod
    def build(cls, sizes, activations, rng: np.random.Generator, std: float = INIT_STD,
              slope: float = 0.2) -> "Mlp":
        """Gaussian(0, std) weights, zero biases."""
        if len(activations) != len(sizes) - 1:
            raise ValueError("need one activation per layer")
        layers = [
            Layer(rng.normal(0.0, std, size=(fan_in, fan_out)), np.zeros(fan_out), act, slope)
            for fan_in, fan_out, act in zip(sizes[:-1], sizes[1:], activations)
        ]
        return cls(layers)

    @classmethod
    def discriminator(cls, input_dim: int, rng, hidden: int = 64, depth: int = 3,
                      slope: float = 0.2, std: float = INIT_STD) -> "Mlp":
        sizes = [input_dim] + [hidden] * (depth - 1) + [1]
        acts = ["leaky_relu"] * (depth - 1) + ["sigmoid"]
        return cls.build(sizes, acts, rng, std, slope)

    @classmethod
    def generator(cls, latent_dim: int, output_dim: int, rng, hidden: int = 64, depth: int = 3,
                  slope: float = 0.2, output_activation: str = "identity",
                  std: float = INIT_STD) -> "Mlp":
        sizes = [latent_dim] + [hidden] * (depth - 1) + [output_dim]
        acts = ["leaky_relu"] * (depth - 1) + [output_activation]
        return cls.build(sizes, acts, rng, std, slope)

    def parameters(self) -> list[np.ndarray]:
        params = []
        for layer in self.layers:
            params.append(layer.weight)
            if layer.bias is not None:
                params.append(layer.bias)
        return params

    def set_parameters(self, values) -> None:
        values = list(values)
        i = 0
        for layer in self.layers:
            layer.weight = np.asarray(values[i], dtype=float)
            i += 1
            if layer.bias is not None:
                layer.bias = np.asarray(values[i], dtype=float)
                i += 1

    def copy(self) -> "Mlp":
        return Mlp([Layer(l.weight.copy(), None if l.bias is None else l.bias.copy(),
                          l.activation, l.slope) for l in self.layers])

    def predict(self, x) -> np.ndarray:
        """Plain numpy forward pass, no tape."""
        h = np.asarray(x, dtype=float)
        for layer in self.layers:
            h = h @ layer.weight
            if layer.bias is not None:
                h = h + layer.bias
            h = _apply_activation(h, layer)
        return h

    def logits(self, x) -> np.ndarray:
        h = np.asarray(x, dtype=float)
        for layer in self.layers[:-1]:
            h = h @ layer.weight
            if layer.bias is not None:
                h = h + layer.bias
            h = _apply_activation(h, layer)
        last = self.layers[-1]
        h = h @ last.weight
        return h + last.bias if last.bias is not None else h

    __call__ = predict

    def forward(self, batch, tape: Tape | None = None, *, trainable: bool = True,
                inputs: Node | None = None, tangent=None) -> ForwardPass:
        """Record a forward pass on ``tape`` (a new tape if omitted).

        ``trainable=False`` records parameters as constants, which is how one
        network is frozen while the other is updated.  ``tangent`` is an
        input-space direction (same shape as the batch) to push forward.
        """
        tape = tape or Tape()
        if inputs is None:
            batch = np.asarray(batch, dtype=float)
            if batch.ndim != 2 or batch.shape[1] != self.input_dim or batch.shape[0] == 0:
                raise ShapeMismatch(
                    f"batch of shape {batch.shape} does not fit input_dim {self.input_dim}")
            inputs = tape.constant(batch)
        make = tape.leaf if trainable else tape.constant
        params = [make(p) for p in self.parameters()]
        h = inputs
        dh = None if tangent is None else tape.lift(np.asarray(tangent, dtype=float))
        it = iter(params)
        pre = h
        for layer in self.layers:
            w = next(it)
            pre = h @ w
            if layer.bias is not None:
                pre = pre + next(it)
            dpre = None if dh is None else dh @ w
            h, dh = _activation_node(pre, dpre, layer)
        tangent_logit = None if tangent is None else dpre
        return ForwardPass(tape, params, inputs, pre, h, tangent_logit)


def _apply_activation(h, layer: Layer):
    if layer.activation == "leaky_relu":
        return h * ad.leaky_relu_slopes(h, layer.slope)
    if layer.activation == "tanh":
        return np.tanh(h)
    if layer.activation == "sigmoid":
        return ad.sigmoid_value(h)
    return h


def _activation_node(pre: Node, dpre: Node | None, layer: Layer):
    act = layer.activation
    if act == "leaky_relu":
        out = ad.leaky_relu(pre, layer.slope)
        if dpre is not None:
            dpre = dpre * ad.leaky_relu_slopes(pre.value, layer.slope)
        return out, dpre
    if act == "tanh":
        out = ad.tanh(pre)
        return out, None if dpre is None else dpre * (1.0 - out * out)
    if act == "sigmoid":
        out = ad.sigmoid(pre)
        return out, None if dpre is None else dpre * out * (1.0 - out)
    return pre, dpre


def forward(net: Mlp, batch) -> tuple[np.ndarray, ForwardPass]:
    """Outputs of ``net`` on ``batch`` plus the recorded pass."""
    fp = net.forward(batch)
    return fp.value, fp


def _check_saturation(logits: np.ndarray) -> None:
    d = ad.sigmoid_value(logits)
    if np.any(d <= SATURATION_EPS) or np.any(d >= 1.0 - SATURATION_EPS):
        raise SaturatedDiscriminator("discriminator output within 1e-12 of 0 or 1")


def input_gradients(net: Mlp, x) -> np.ndarray:
    """Row-wise gradient of the discriminator logit with respect to its input."""
    x = np.asarray(x, dtype=float)
    tape = Tape()
    xs = tape.leaf(x)
    fp = net.forward(None, tape, trainable=False, inputs=xs)
    return tape.backward(ad.total(fp.logit), [xs])[0]


def input_gradient_norm_sq(net: Mlp, x, tape: Tape | None = None,
                           params_trainable: bool = True) -> tuple[Node, ForwardPass]:
    """Per-sample ``||grad_x logit(D(x))||^2`` as a node differentiable in the parameters.

    The input gradient ``g`` is found by a reverse pass; the parameter
    gradient comes from pushing the tangent ``g`` forward and reverse-
    differentiating the resulting directional derivative ``s = g . grad_x
    logit``.  Since ``d||g||^2 = 2 (dg)^T g``, the node ``2 s - stop(s)`` has
    value ``||g||^2`` and the correct parameter gradient.
    """
    if not net.is_discriminator:
        raise ValueError("input_gradient_norm_sq needs a sigmoid-output discriminator")
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != net.input_dim or x.shape[0] == 0:
        raise ShapeMismatch(f"batch of shape {x.shape} does not fit input_dim {net.input_dim}")
    _check_saturation(net.logits(x))
    g = input_gradients(net, x)
    fp = net.forward(x, tape, trainable=params_trainable, tangent=g)
    s = ad.reshape(fp.tangent, (x.shape[0],))
    return 2.0 * s - ad.detach(s), fp


# Adam ------------------------------------------------------------------------

@dataclass
class AdamState:
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-7
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    step: int = 0

    @classmethod
    def for_params(cls, params, **hyper) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params],
                   **hyper)


def adam_step(state: AdamState, params: list, grads: list):
    """One bias-corrected Adam update; ``params`` are updated in place and returned."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeMismatch("params, grads and optimizer state differ in length")
    for p, g, m in zip(params, grads, state.m):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeMismatch(f"shape mismatch {p.shape} / {g.shape} / {m.shape}")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= state.learning_rate * (m / c1) / (np.sqrt(v / c2) + state.epsilon)
    return params, state


# checkpoints -----------------------------------------------------------------

def mlp_to_dict(net: Mlp) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layers": [
            {
                "shape": list(layer.weight.shape),
                "weights": layer.weight.ravel(order="C").tolist(),
                "bias": None if layer.bias is None else layer.bias.tolist(),
                "activation": layer.activation,
                "slope": layer.slope,
            }
            for layer in net.layers
        ],
    }


def mlp_from_dict(doc: dict) -> Mlp:
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"not a {CHECKPOINT_FORMAT} document")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {doc.get('version')!r}")
    layers = []
    for spec in doc["layers"]:
        w = np.array(spec["weights"], dtype=float).reshape(spec["shape"])
        b = None if spec["bias"] is None else np.array(spec["bias"], dtype=float)
        layers.append(Layer(w, b, spec["activation"], spec.get("slope", 0.2)))
    return Mlp(layers)


def save_checkpoint(net: Mlp, path) -> None:
    # json writes floats with repr(), which round-trips exactly
    Path(path).write_text(json.dumps(mlp_to_dict(net)))


def load_checkpoint(path) -> Mlp:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    return mlp_from_dict(doc)
