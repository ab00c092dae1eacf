"""Discrete probability vectors and evaluable densities on the real line.

Every divergence in :mod:`renyigan_lab.measures` takes two objects from this
module.  Continuous densities expose a vectorized ``pdf``, a finite
integration window ``support`` and the ``breakpoints`` (bin edges, support
ends) where the density may be discontinuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InvalidDistribution, OrderOutOfRange, SupportMismatch
from .quadrature import NODES

# Gaussian kinds are truncated at this many standard deviations.
GAUSS_TRUNCATION = 12.0


class DiscreteDist:
    """Non-negative weights indexed by support position.

    Probability vectors must sum to 1 within 1e-12.  ``DiscreteDist.measure``
    builds an unnormalized non-negative measure (for the sum density that
    appears in the LkGAN identity).
    """

    def __init__(self, probs, *, normalized: bool = True):
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 1 or probs.size < 1:
            raise InvalidDistribution("probs must be a non-empty 1-D vector")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidDistribution("probs must be finite and non-negative")
        if normalized and abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidDistribution(f"probs sum to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        self.probs = probs
        self.normalized = normalized

    @classmethod
    def measure(cls, masses) -> "DiscreteDist":
        return cls(masses, normalized=False)

    @property
    def mass(self) -> float:
        return float(self.probs.sum())

    @property
    def dimension(self) -> int:
        return self.probs.size

    def __len__(self):
        return self.probs.size

    def __repr__(self):
        return f"DiscreteDist({self.probs.tolist()!r})"


@dataclass(frozen=True)
class ContinuousDensity:
    """A density on an interval of the real line.

    Use the constructors :func:`gaussian`, :func:`histogram`,
    :func:`evaluable` rather than building this directly.
    """

    kind: str
    pdf: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    params: dict = field(default_factory=dict, compare=False)
    mass: float = 1.0
    logpdf: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.pdf(np.asarray(x, dtype=float))

    def log(self, x):
        """Log-density; exact in the tails for Gaussian kinds."""
        if self.logpdf is not None:
            return self.logpdf(x)
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def scaled(self, factor: float) -> "ContinuousDensity":
        """The non-negative measure ``factor * self`` (mass is multiplied)."""
        if factor < 0:
            raise InvalidDistribution("scale factor must be non-negative")
        pdf = self.pdf
        return ContinuousDensity("evaluable", lambda x: factor * pdf(x), self.support,
                                 self.breakpoints, {"scaled": factor}, self.mass * factor)


@dataclass(frozen=True)
class DiagGaussian:
    """Product of independent 1-D Gaussians in ``R^d``."""

    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        var = np.atleast_1d(np.asarray(self.var, dtype=float))
        if mean.shape != var.shape or mean.ndim != 1:
            raise InvalidDistribution("mean and variance vectors must share a 1-D shape")
        if np.any(var <= 0):
            raise InvalidDistribution("variance entries must be > 0")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)

    @property
    def dimension(self) -> int:
        return self.mean.size

    def marginals(self) -> list[ContinuousDensity]:
        return [gaussian(m, v) for m, v in zip(self.mean, self.var)]


Distribution = Union[DiscreteDist, ContinuousDensity, DiagGaussian]


def gaussian(mean: float, variance: float) -> ContinuousDensity:
    if not variance > 0:
        raise InvalidDistribution("Gaussian variance must be > 0")
    mean = float(mean)
    variance = float(variance)
    sd = math.sqrt(variance)
    norm = 1.0 / math.sqrt(2 * math.pi * variance)

    lognorm = math.log(norm)

    def pdf(x):
        return norm * np.exp(-0.5 * (x - mean) ** 2 / variance)

    def logpdf(x):
        return lognorm - 0.5 * (x - mean) ** 2 / variance

    lo, hi = mean - GAUSS_TRUNCATION * sd, mean + GAUSS_TRUNCATION * sd
    return ContinuousDensity("gaussian1d", pdf, (lo, hi), (lo, mean, hi),
                             {"mean": mean, "variance": variance}, logpdf=logpdf)


def histogram(edges: Sequence[float], masses: Sequence[float]) -> ContinuousDensity:
    """Piecewise-constant density; ``masses[i]`` is the probability of bin i."""
    edges = np.asarray(edges, dtype=float)
    masses = np.asarray(masses, dtype=float)
    if edges.ndim != 1 or edges.size != masses.size + 1 or masses.size < 1:
        raise InvalidDistribution("need len(edges) == len(masses) + 1 >= 2")
    if np.any(np.diff(edges) <= 0):
        raise InvalidDistribution("bin edges must be strictly increasing")
    if np.any(masses < 0) or not np.all(np.isfinite(masses)):
        raise InvalidDistribution("histogram masses must be finite and non-negative")
    if abs(masses.sum() - 1.0) > 1e-10:
        raise InvalidDistribution(f"histogram masses sum to {masses.sum()!r}, not 1")
    heights = masses / np.diff(edges)

    def pdf(x):
        idx = np.searchsorted(edges, x, side="right") - 1
        inside = (idx >= 0) & (idx < heights.size)
        out = np.zeros(np.shape(x))
        out[inside] = heights[idx[inside]]
        return out

    return ContinuousDensity("histogram", pdf, (float(edges[0]), float(edges[-1])),
                             tuple(edges.tolist()),
                             {"edges": edges, "masses": masses})


def histogram_from_samples(samples, bins: int = 256, range_=None) -> ContinuousDensity:
    counts, edges = np.histogram(np.asarray(samples, dtype=float), bins=bins, range=range_)
    return histogram(edges, counts / counts.sum())


def evaluable(pdf: Callable[[np.ndarray], np.ndarray], support: tuple[float, float],
              breakpoints: Sequence[float] = (), check: bool = True) -> ContinuousDensity:
    """Wrap a user density; non-negativity is spot-checked on a grid."""
    lo, hi = float(support[0]), float(support[1])
    if not hi > lo:
        raise InvalidDistribution("support must be a non-degenerate interval")
    if check:
        grid = lo + (hi - lo) * np.concatenate([(NODES + 1) / 2, np.linspace(0, 1, 33)])
        vals = np.asarray(pdf(grid), dtype=float)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise InvalidDistribution("evaluable pdf is negative or non-finite on its support")
    return ContinuousDensity("evaluable", pdf, (lo, hi), tuple(sorted(breakpoints)))


def _union(p: ContinuousDensity, q: ContinuousDensity):
    lo = min(p.support[0], q.support[0])
    hi = max(p.support[1], q.support[1])
    bps = tuple(sorted(set(p.breakpoints) | set(q.breakpoints)))
    return (lo, hi), bps


def mixture(p: Distribution, q: Distribution, weight: float = 0.5):
    """``weight * p + (1 - weight) * q``."""
    if isinstance(p, DiscreteDist) and isinstance(q, DiscreteDist):
        if p.dimension != q.dimension:
            raise SupportMismatch("discrete distributions differ in dimension")
        return DiscreteDist(weight * p.probs + (1 - weight) * q.probs,
                            normalized=p.normalized and q.normalized)
    if isinstance(p, ContinuousDensity) and isinstance(q, ContinuousDensity):
        support, bps = _union(p, q)
        pp, qq = p.pdf, q.pdf
        logmix = None
        if p.logpdf is not None and q.logpdf is not None and 0 < weight < 1:
            lw, lv = math.log(weight), math.log1p(-weight)

            def logmix(x):
                return np.logaddexp(lw + p.logpdf(x), lv + q.logpdf(x))

        return ContinuousDensity("evaluable", lambda x: weight * pp(x) + (1 - weight) * qq(x),
                                 support, bps, {"mixture": weight},
                                 weight * p.mass + (1 - weight) * q.mass, logpdf=logmix)
    raise SupportMismatch(f"cannot mix {type(p).__name__} with {type(q).__name__}")


def sum_measure(p: Distribution, q: Distribution):
    """The unnormalized measure ``p + q`` (total mass 2 for two probabilities)."""
    if isinstance(p, DiscreteDist) and isinstance(q, DiscreteDist):
        m = mixture(p, q)
        return DiscreteDist.measure(2 * m.probs)
    m = mixture(p, q)
    return m.scaled(2.0)


def scaled(p: Distribution, factor: float):
    if isinstance(p, DiscreteDist):
        return DiscreteDist.measure(factor * p.probs)
    return p.scaled(factor)


@dataclass(frozen=True)
class Order:
    """A positive real order; ``renyi=True`` additionally forbids 1."""

    value: float
    renyi: bool = True

    def __post_init__(self):
        check_order(self.value, renyi=self.renyi)

    def __float__(self):
        return float(self.value)


def check_order(value: float, *, renyi: bool = True, pearson: bool = False) -> float:
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise OrderOutOfRange(f"order must be > 0, got {value}")
    if renyi and abs(value - 1.0) <= 1e-9:
        raise OrderOutOfRange("order 1 is excluded; use the Shannon measures or the limit helper")
    if pearson and value < 1:
        raise OrderOutOfRange(f"Pearson-Vajda order must be >= 1, got {value}")
    return value
