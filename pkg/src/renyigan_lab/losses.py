"""Batch losses for LkGAN and RényiGAN training, the simplified gradient
penalty, and the between-epoch alpha schedule.

Loss functions accept either tape nodes (for training) or plain arrays (for
evaluation); arrays are placed on a fresh tape.  Each returns a scalar node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Node, Tape
from .distributions import check_order
from .errors import (
    BatchLengthMismatch,
    EmptyBatch,
    InvalidInterval,
    SaturatedDiscriminator,
)
from .nn import Mlp, input_gradient_norm_sq

# Discriminator outputs are clamped to [CLAMP, 1 - CLAMP] before any logarithm.
CLAMP = 1e-7
LOG2 = math.log(2.0)
ALPHA_FLOOR = 1e-3
ALPHA_GAP = 1e-3


@dataclass(frozen=True)
class LkganParams:
    """Order ``k`` and the labels ``a`` (fake), ``b`` (real), ``c`` (generator target)."""

    k: float = 2.0
    a: float = 1.0
    b: float = 0.0
    c: float = 0.5

    def __post_init__(self):
        check_order(self.k, renyi=False, pearson=True)
        for name in ("a", "b", "c"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def v1(cls, k: float = 2.0) -> "LkganParams":
        return cls(k, 0.6, 0.4, 0.5)

    @classmethod
    def v2(cls, k: float = 2.0) -> "LkganParams":
        return cls(k, 1.0, 0.0, 0.5)

    @classmethod
    def v3(cls, k: float = 2.0) -> "LkganParams":
        return cls(k, 0.0, 1.0, 1.0)

    @classmethod
    def version(cls, name: str, k: float = 2.0) -> "LkganParams":
        try:
            return {"v1": cls.v1, "v2": cls.v2, "v3": cls.v3}[name](k)
        except KeyError:
            raise ValueError(f"unknown LkGAN version {name!r}") from None

    @property
    def divergence_constraint_holds(self) -> bool:
        """Whether ``a - b == 2 (c - b)``, the condition for the Pearson-Vajda identity."""
        return abs((self.a - self.b) - 2.0 * (self.c - self.b)) <= 1e-12


@dataclass(frozen=True)
class RenyiganParams:
    alpha: float = 3.0
    l1_normalized: bool = False
    alpha_schedule: tuple[float, float] | None = None

    def __post_init__(self):
        check_order(self.alpha)
        if self.alpha_schedule is not None:
            lo, hi = self.alpha_schedule
            if not 0 <= lo < hi:
                raise InvalidInterval(f"alpha schedule needs 0 <= beta1 < beta2, got {self.alpha_schedule}")


@dataclass(frozen=True)
class PenaltyConfig:
    enabled: bool = False
    coefficient: float = 5.0

    def __post_init__(self):
        if self.coefficient < 0:
            raise ValueError("penalty coefficient must be >= 0")


def _lift(*batches):
    tape = next((b.tape for b in batches if isinstance(b, Node)), None) or Tape()
    nodes = []
    for b in batches:
        node = tape.lift(b if isinstance(b, Node) else np.asarray(b, dtype=float))
        if node.value.size == 0:
            raise EmptyBatch("loss batches must be non-empty")
        nodes.append(ad.reshape(node, (node.value.size,)))
    return nodes


def _check_lengths(a: Node, b: Node):
    if a.value.size != b.value.size:
        raise BatchLengthMismatch(f"batch lengths differ: {a.value.size} vs {b.value.size}")


def _clamped(d: Node, clamp: bool) -> Node:
    if clamp:
        return ad.clip(d, CLAMP, 1.0 - CLAMP)
    return d


def _check_log_args(values: np.ndarray):
    if not np.all(np.isfinite(values)) or np.any(values <= 1e-300):
        raise SaturatedDiscriminator("argument of log is <= 1e-300")


def lkgan_disc_loss(d_real, d_fake, params: LkganParams) -> Node:
    """mean of (d_real - b)^2 / 2 + (d_fake - a)^2 / 2."""
    d_real, d_fake = _lift(d_real, d_fake)
    _check_lengths(d_real, d_fake)
    r = d_real - params.b
    f = d_fake - params.a
    return ad.mean(0.5 * r * r + 0.5 * f * f)


def lkgan_gen_loss(d_fake, params: LkganParams) -> Node:
    """mean |d_fake - c|^k; only the fake-sample term depends on the generator."""
    (d_fake,) = _lift(d_fake)
    return ad.mean(ad.power(ad.abs_(d_fake - params.c), params.k))


def lkgan_real_term(d_real, params: LkganParams) -> float:
    """The real-sample half of the population generator loss (logged, not trained on)."""
    d_real = np.asarray(d_real, dtype=float).ravel()
    return float(np.mean(np.abs(d_real - params.c) ** params.k))


def gan_disc_loss(d_real, d_fake, clamp: bool = True) -> Node:
    """-mean(log d_real + log(1 - d_fake))."""
    d_real, d_fake = _lift(d_real, d_fake)
    _check_lengths(d_real, d_fake)
    if not clamp:
        _check_log_args(d_real.value)
        _check_log_args(1.0 - d_fake.value)
    real = _clamped(d_real, clamp)
    fake = _clamped(d_fake, clamp)
    return -ad.mean(ad.log(real) + ad.log(1.0 - fake))


def _log_mean_power(base: Node, order: float) -> Node:
    # (1 / (order - 1)) * log mean(base ** (order - 1))
    return ad.log(ad.mean(ad.power(base, order - 1.0))) * (1.0 / (order - 1.0))


def renyigan_gen_loss(d_fake, alpha: float, l1: bool = False, clamp: bool = True) -> Node:
    """(1 / (alpha - 1)) log mean (1 - d_fake)^(alpha - 1), optionally |... + log 2|."""
    alpha = check_order(alpha)
    (d_fake,) = _lift(d_fake)
    if not clamp:
        _check_log_args(1.0 - d_fake.value)
    out = _log_mean_power(1.0 - _clamped(d_fake, clamp), alpha)
    if l1:
        out = ad.abs_(out + LOG2)
    return out


def shannon_gen_loss(d_fake, l1: bool = False, clamp: bool = True) -> Node:
    """mean log(1 - d_fake): the alpha -> 1 case used by the DCGAN baseline."""
    (d_fake,) = _lift(d_fake)
    if not clamp:
        _check_log_args(1.0 - d_fake.value)
    out = ad.mean(ad.log(1.0 - _clamped(d_fake, clamp)))
    if l1:
        out = ad.abs_(out + LOG2)
    return out


def gradient_penalty(net: Mlp, real_batch, cfg: PenaltyConfig, tape: Tape | None = None):
    """coefficient * mean ||grad_x logit(D(x))||^2 over the real samples.

    Returns ``(node, forward_pass)``; the pass holds the parameter leaves the
    node depends on.
    """
    if not cfg.enabled:
        raise ValueError("gradient_penalty called with the penalty disabled")
    real_batch = np.asarray(real_batch, dtype=float)
    if real_batch.size == 0:
        raise EmptyBatch("penalty batch must be non-empty")
    norms, fp = input_gradient_norm_sq(net, real_batch, tape)
    return cfg.coefficient * ad.mean(norms), fp


def schedule_alpha(schedule: tuple[float, float], epoch: int, total_epochs: int) -> float:
    """Linear sweep from beta1 (epoch 0) to beta2 (last epoch).

    Values are floored at 1e-3 and pushed out of the window 1 +/- 1e-3 on the
    side they fall.
    """
    lo, hi = float(schedule[0]), float(schedule[1])
    if not 0 <= lo < hi:
        raise InvalidInterval(f"need 0 <= beta1 < beta2, got [{lo}, {hi}]")
    if not 0 <= epoch < total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {total_epochs})")
    frac = epoch / (total_epochs - 1) if total_epochs > 1 else 0.0
    alpha = lo + frac * (hi - lo)
    if alpha < ALPHA_FLOOR:
        alpha = ALPHA_FLOOR
    if abs(alpha - 1.0) < ALPHA_GAP:
        alpha = 1.0 - ALPHA_GAP if alpha < 1.0 else 1.0 + ALPHA_GAP
    return alpha
