"""Closed forms for 1-D Gaussians.

A separate backend used as an independent oracle in tests; the measures
module never calls into it.
"""

from __future__ import annotations

import math

from .errors import IntegralDiverges


def kl(mp: float, vp: float, mq: float, vq: float) -> float:
    return 0.5 * (math.log(vq / vp) + (vp + (mp - mq) ** 2) / vq - 1.0)


def renyi_divergence(mp: float, vp: float, mq: float, vq: float, alpha: float) -> float:
    va = alpha * vq + (1.0 - alpha) * vp
    if va <= 0:
        raise IntegralDiverges("alpha vq + (1 - alpha) vp must be > 0")
    return (alpha * (mp - mq) ** 2 / (2.0 * va)
            - math.log(va / (vp ** (1.0 - alpha) * vq ** alpha)) / (2.0 * (alpha - 1.0)))


def shannon_cross_entropy(mp: float, vp: float, mq: float, vq: float) -> float:
    return 0.5 * math.log(2 * math.pi * vq) + (vp + (mp - mq) ** 2) / (2.0 * vq)


def entropy(v: float) -> float:
    return 0.5 * math.log(2 * math.pi * math.e * v)


def renyi_cross_entropy(mp: float, vp: float, mq: float, vq: float, alpha: float) -> float:
    """(1 / (1 - alpha)) log of the integral of p q^(alpha - 1)."""
    beta = alpha - 1.0
    s = vq + beta * vp
    if s <= 0:
        raise IntegralDiverges("vq + (alpha - 1) vp must be > 0")
    log_int = (-0.5 * beta * math.log(2 * math.pi * vq) + 0.5 * math.log(vq / s)
               - beta * (mp - mq) ** 2 / (2.0 * s))
    return -log_int / beta
