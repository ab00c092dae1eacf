"""Information measures: KL, Shannon and Rényi cross-entropies, Rényi,
Jensen-Shannon, Jensen-Rényi and Pearson-Vajda divergences.

All logarithms are natural.  Discrete inputs are summed exactly (indices
where both weights vanish are skipped); continuous 1-D inputs go through the
adaptive quadrature in :mod:`renyigan_lab.quadrature`; diagonal Gaussians in
``R^d`` are handled by factorization for the measures that factorize.

Rényi-type quantities are evaluated in the form ``log1p(integral of p *
expm1(...))`` so that orders within 1e-4 of one keep their precision.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .distributions import (
    GAUSS_TRUNCATION,
    ContinuousDensity,
    DiagGaussian,
    DiscreteDist,
    Distribution,
    check_order,
    mixture,
)
from .errors import (
    AbsoluteContinuityViolation,
    DivisionByZeroSupport,
    IntegralDiverges,
    LogOfZero,
    NegativeFunctionValue,
    SupportMismatch,
    UnsupportedDistribution,
)
from .quadrature import DEFAULT_QUADRATURE, Quadrature

__all__ = [
    "kl_divergence",
    "shannon_cross_entropy",
    "shannon_cross_entropy_functional",
    "pearson_vajda",
    "chi_square",
    "renyi_divergence",
    "renyi_cross_entropy",
    "renyi_cross_entropy_functional",
    "jensen_shannon",
    "jensen_renyi",
    "order_one_limit",
    "MEASURES",
]


def _pair_kind(p: Distribution, q: Distribution) -> str:
    if isinstance(p, DiscreteDist) and isinstance(q, DiscreteDist):
        if p.dimension != q.dimension:
            raise SupportMismatch(f"dimensions differ: {p.dimension} vs {q.dimension}")
        return "discrete"
    if isinstance(p, ContinuousDensity) and isinstance(q, ContinuousDensity):
        return "continuous"
    if isinstance(p, DiagGaussian) and isinstance(q, DiagGaussian):
        if p.dimension != q.dimension:
            raise SupportMismatch(f"dimensions differ: {p.dimension} vs {q.dimension}")
        return "diag"
    raise SupportMismatch(f"cannot compare {type(p).__name__} with {type(q).__name__}")


def _breaks(*dists):
    pts = set()
    for d in dists:
        pts.update(d.breakpoints)
        pts.update(d.support)
    return sorted(pts)


def _over_p(f, p: ContinuousDensity, q: ContinuousDensity, quad: Quadrature) -> float:
    return quad(f, p.support[0], p.support[1], _breaks(p, q))[0]


def _over_union(f, p: ContinuousDensity, q: ContinuousDensity, quad: Quadrature) -> float:
    lo = min(p.support[0], q.support[0])
    hi = max(p.support[1], q.support[1])
    return quad(f, lo, hi, _breaks(p, q))[0]


def _gaussian_window(p: ContinuousDensity, q: ContinuousDensity, a: float, b: float):
    """Integration window for integrands shaped like p^a q^b.

    For two Gaussians the product is itself Gaussian-shaped and can be much
    wider than p (b < 0, q narrower than p); the window is widened to cover
    GAUSS_TRUNCATION of its standard deviations.
    """
    lo, hi = p.support
    breaks = _breaks(p, q)
    if p.kind == q.kind == "gaussian1d":
        (mp, vp), (mq, vq) = ((d.params["mean"], d.params["variance"]) for d in (p, q))
        prec = a / vp + b / vq
        if prec > 0:
            centre = (a * mp / vp + b * mq / vq) / prec
            half = GAUSS_TRUNCATION / math.sqrt(prec)
            lo, hi = min(lo, centre - half), max(hi, centre + half)
            breaks = sorted(set(breaks) | {centre, lo, hi})
    return lo, hi, [x for x in breaks if lo <= x <= hi]


def _xlogy_ratio(p, logp, logq):
    """p * (log p - log q) with 0 where p == 0; raises on p > 0, q == 0."""
    pos = p > 0
    if np.any(pos & np.isneginf(logq)):
        raise AbsoluteContinuityViolation("p > 0 where q = 0")
    out = np.zeros_like(p)
    out[pos] = p[pos] * (logp[pos] - logq[pos])
    return out


def kl_divergence(p: Distribution, q: Distribution, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """KL(p || q) = integral of p log(p / q)."""
    kind = _pair_kind(p, q)
    if kind == "discrete":
        with np.errstate(divide="ignore"):
            return float(_xlogy_ratio(p.probs, np.log(p.probs), np.log(q.probs)).sum())
    if kind == "diag":
        return sum(kl_divergence(a, b, quad) for a, b in zip(p.marginals(), q.marginals()))

    def f(x):
        return _xlogy_ratio(p(x), p.log(x), q.log(x))

    return _over_p(f, p, q, quad)


def shannon_cross_entropy_functional(p: Distribution, log_q, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """-integral of p log q for a non-negative function q given through its log.

    ``log_q`` is an array (discrete p) or a callable returning log q(x).
    """
    if isinstance(p, DiscreteDist):
        log_q = np.asarray(log_q, dtype=float)
        pos = p.probs > 0
        if np.any(np.isneginf(log_q[pos])):
            raise AbsoluteContinuityViolation("p > 0 where q = 0")
        return float(-(p.probs[pos] * log_q[pos]).sum())

    def f(x):
        px = p(x)
        lq = log_q(x)
        pos = px > 0
        if np.any(pos & np.isneginf(lq)):
            raise AbsoluteContinuityViolation("p > 0 where q = 0")
        out = np.zeros_like(px)
        out[pos] = -px[pos] * lq[pos]
        return out

    return quad(f, p.support[0], p.support[1], p.breakpoints)[0]


def shannon_cross_entropy(p: Distribution, q: Distribution, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """h(p; q) = -integral of p log q."""
    kind = _pair_kind(p, q)
    if kind == "discrete":
        with np.errstate(divide="ignore"):
            return shannon_cross_entropy_functional(p, np.log(q.probs))
    if kind == "diag":
        return sum(shannon_cross_entropy(a, b, quad) for a, b in zip(p.marginals(), q.marginals()))

    def f(x):
        px = p(x)
        lq = q.log(x)
        pos = px > 0
        if np.any(pos & np.isneginf(lq)):
            raise AbsoluteContinuityViolation("p > 0 where q = 0")
        out = np.zeros_like(px)
        out[pos] = -px[pos] * lq[pos]
        return out

    return _over_p(f, p, q, quad)


def _pv_integrand(p, q, k):
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = np.abs(q[pos] - p[pos]) ** k / p[pos] ** (k - 1)
    stray = ~pos & (q > 0)
    if np.any(stray):
        if k > 1:
            raise DivisionByZeroSupport("p = 0 where q > 0 with order k > 1")
        out[stray] = q[stray]
    return out


def pearson_vajda(p: Distribution, q: Distribution, k: float, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """|chi|^k(p || q) = integral of |q - p|^k / p^(k-1), k >= 1.

    Accepts unnormalized non-negative measures (see ``DiscreteDist.measure``
    and ``ContinuousDensity.scaled``).
    """
    k = check_order(k, renyi=False, pearson=True)
    kind = _pair_kind(p, q)
    if kind == "discrete":
        return float(_pv_integrand(p.probs, q.probs, k).sum())
    if kind == "diag":
        raise UnsupportedDistribution("Pearson-Vajda does not factorize over dimensions")
    return _over_union(lambda x: _pv_integrand(p(x), q(x), k), p, q, quad)


def chi_square(p: DiscreteDist, q: DiscreteDist) -> float:
    """Pearson chi^2(p || q) = sum (q - p)^2 / p, discrete only."""
    _pair_kind(p, q)
    pos = p.probs > 0
    if np.any(~pos & (q.probs > 0)):
        raise DivisionByZeroSupport("p = 0 where q > 0")
    d = q.probs[pos] - p.probs[pos]
    return float(np.sum(d * d / p.probs[pos]))


def _powered_mean(p, logp, t, direct=False):
    """p * expm1(t), or p * exp(t) when ``direct``, without overflow for large t."""
    if direct:
        return np.exp(logp + t)
    out = np.empty_like(p)
    small = t < 1.0
    out[small] = p[small] * np.expm1(t[small])
    big = ~small
    out[big] = np.exp(logp[big] + t[big]) - p[big]
    return out


def _renyi_div_terms(p, logp, logq, alpha, direct=False):
    """Integrand p * (exp((1-alpha) log(q/p)) - 1) on p > 0."""
    pos = p > 0
    out = np.zeros_like(p)
    if not np.any(pos):
        return out
    lq = logq[pos]
    if alpha > 1 and np.any(np.isneginf(lq)):
        raise IntegralDiverges("p > 0 where q = 0 with alpha > 1")
    with np.errstate(invalid="ignore"):
        t = (1.0 - alpha) * (lq - logp[pos])
    if alpha < 1:
        t = np.where(np.isneginf(lq), -np.inf, t)
    out[pos] = _powered_mean(p[pos], logp[pos], t, direct)
    return out


def _log_of_integral(mass_minus_one: float, integrate_terms: Callable[[bool], float],
                     what: str) -> float:
    """log of an integral I of p exp(t).

    Near I = 1 (orders close to 1) the integral is accumulated as
    mass - 1 + integral of p expm1(t) and passed to log1p, which keeps the
    relative precision of log I.  Away from 1 that form cancels badly, so
    I itself is integrated instead.
    """
    total = mass_minus_one + integrate_terms(False)
    if not np.isfinite(total):
        raise IntegralDiverges(f"{what} integral is infinite")
    if -0.5 <= total <= 1.0:
        return math.log1p(total)
    value = integrate_terms(True)
    if not np.isfinite(value):
        raise IntegralDiverges(f"{what} integral is infinite")
    if value <= 0.0:
        raise LogOfZero(f"{what} integral is zero")
    return math.log(value)


def _check_gaussian_integrability(p, q, alpha):
    if p.kind == q.kind == "gaussian1d":
        vp, vq = p.params["variance"], q.params["variance"]
        if alpha * vq + (1 - alpha) * vp <= 0:
            raise IntegralDiverges(
                "integral of p^alpha q^(1-alpha) diverges: alpha*var_q + (1-alpha)*var_p <= 0"
            )


def renyi_divergence(p: Distribution, q: Distribution, alpha: float,
                     quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """D_alpha(p || q) = log(integral of p^alpha q^(1-alpha)) / (alpha - 1)."""
    alpha = check_order(alpha)
    kind = _pair_kind(p, q)
    if kind == "discrete":
        with np.errstate(divide="ignore"):
            logp, logq = np.log(p.probs), np.log(q.probs)
        terms = lambda direct: float(_renyi_div_terms(p.probs, logp, logq, alpha, direct).sum())  # noqa: E731
        return _log_of_integral(p.mass - 1.0, terms, "Renyi") / (alpha - 1.0)
    if kind == "diag":
        return sum(renyi_divergence(a, b, alpha, quad) for a, b in zip(p.marginals(), q.marginals()))
    _check_gaussian_integrability(p, q, alpha)
    lo, hi, breaks = _gaussian_window(p, q, alpha, 1.0 - alpha)
    terms = lambda direct: quad(  # noqa: E731
        lambda x: _renyi_div_terms(p(x), p.log(x), q.log(x), alpha, direct), lo, hi, breaks)[0]
    return _log_of_integral(p.mass - 1.0, terms, "Renyi") / (alpha - 1.0)


def _renyi_ce_terms(p, logq, alpha, direct=False):
    pos = p > 0
    out = np.zeros_like(p)
    lq = logq[pos]
    if alpha < 1 and np.any(np.isneginf(lq)):
        raise IntegralDiverges("q = 0 where p > 0 with alpha < 1")
    t = (alpha - 1.0) * lq
    with np.errstate(divide="ignore"):
        out[pos] = _powered_mean(p[pos], np.log(p[pos]), t, direct)
    return out


def _as_log_fn(q_fn):
    def log_q(x):
        vals = np.asarray(q_fn(x), dtype=float)
        if np.any(vals < 0):
            raise NegativeFunctionValue("q must be non-negative on the support of p")
        with np.errstate(divide="ignore"):
            return np.log(vals)
    return log_q


def renyi_cross_entropy_functional(p: Distribution, q_fn, alpha: float,
                                   quad: Quadrature = DEFAULT_QUADRATURE, *,
                                   log_q: Callable | None = None) -> float:
    """H_alpha(p; q) = log(integral of p q^(alpha-1)) / (1 - alpha) for q >= 0.

    ``q_fn`` is an array of values for discrete ``p`` or a vectorized callable
    for continuous ``p``; it need not integrate to one.  ``log_q`` may be given
    instead of ``q_fn`` for callables whose logarithm is known in closed form.
    """
    alpha = check_order(alpha)
    if isinstance(p, DiscreteDist):
        vals = np.asarray(q_fn, dtype=float)
        if vals.shape != p.probs.shape:
            raise SupportMismatch("q values must align with the support of p")
        if np.any(vals < 0):
            raise NegativeFunctionValue("q must be non-negative")
        with np.errstate(divide="ignore"):
            logv = np.log(vals)
        terms = lambda direct: float(_renyi_ce_terms(p.probs, logv, alpha, direct).sum())  # noqa: E731
        return _log_of_integral(p.mass - 1.0, terms, "Renyi cross-entropy") / (1.0 - alpha)
    if isinstance(p, DiagGaussian):
        raise UnsupportedDistribution("functional form needs a 1-D density or a discrete p")
    lq = log_q if log_q is not None else _as_log_fn(q_fn)
    terms = lambda direct: quad(lambda x: _renyi_ce_terms(p(x), lq(x), alpha, direct),  # noqa: E731
                                p.support[0], p.support[1], p.breakpoints)[0]
    return _log_of_integral(p.mass - 1.0, terms, "Renyi cross-entropy") / (1.0 - alpha)


def renyi_cross_entropy(p: Distribution, q: Distribution, alpha: float,
                        quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """h_alpha(p; q) for two probability distributions."""
    alpha = check_order(alpha)
    kind = _pair_kind(p, q)
    if kind == "discrete":
        return renyi_cross_entropy_functional(p, q.probs, alpha)
    if kind == "diag":
        return sum(renyi_cross_entropy(a, b, alpha, quad) for a, b in zip(p.marginals(), q.marginals()))
    if p.kind == q.kind == "gaussian1d":
        vp, vq = p.params["variance"], q.params["variance"]
        if vq + (alpha - 1.0) * vp <= 0:
            raise IntegralDiverges(
                "integral of p q^(alpha-1) diverges: var_q + (alpha-1)*var_p <= 0")
    lo, hi, breaks = _gaussian_window(p, q, 1.0, alpha - 1.0)
    terms = lambda direct: quad(  # noqa: E731
        lambda x: _renyi_ce_terms(p(x), q.log(x), alpha, direct), lo, hi, breaks)[0]
    return _log_of_integral(p.mass - 1.0, terms, "Renyi cross-entropy") / (1.0 - alpha)


def jensen_shannon(p: Distribution, q: Distribution, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """JSD(p || q) = KL(p || m) / 2 + KL(q || m) / 2 with m = (p + q) / 2."""
    if _pair_kind(p, q) == "diag":
        raise UnsupportedDistribution("Jensen-Shannon does not factorize over dimensions")
    m = mixture(p, q)
    return 0.5 * kl_divergence(p, m, quad) + 0.5 * kl_divergence(q, m, quad)


def jensen_renyi(p: Distribution, q: Distribution, alpha: float,
                 quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """JR_alpha(p || q) = D_alpha(p || m) / 2 + D_alpha(q || m) / 2, m = (p + q) / 2."""
    alpha = check_order(alpha)
    if _pair_kind(p, q) == "diag":
        raise UnsupportedDistribution("Jensen-Renyi does not factorize over dimensions")
    m = mixture(p, q)
    return 0.5 * renyi_divergence(p, m, alpha, quad) + 0.5 * renyi_divergence(q, m, alpha, quad)


_SHANNON_COUNTERPART = {
    renyi_divergence: kl_divergence,
    renyi_cross_entropy: shannon_cross_entropy,
    jensen_renyi: jensen_shannon,
}


def order_one_limit(measure, p: Distribution, q: Distribution, eps: float = 1e-4,
                    quad: Quadrature = DEFAULT_QUADRATURE) -> dict:
    """Evaluate a Rényi-type measure at orders 1 -/+ eps next to its Shannon case.

    Order 1 itself is never passed to the Rényi measure.  Returns the two
    one-sided values, the Shannon value and the larger of the two gaps.
    """
    shannon = _SHANNON_COUNTERPART[measure]
    below = measure(p, q, 1.0 - eps, quad)
    above = measure(p, q, 1.0 + eps, quad)
    limit = shannon(p, q, quad)
    return {"below": below, "above": above, "shannon": limit,
            "gap": max(abs(below - limit), abs(above - limit))}


# Name -> (callable, takes an order argument)
MEASURES = {
    "kl-divergence": (kl_divergence, False),
    "shannon-cross-entropy": (shannon_cross_entropy, False),
    "pearson-vajda": (pearson_vajda, True),
    "renyi-divergence": (renyi_divergence, True),
    "renyi-cross-entropy": (renyi_cross_entropy, True),
    "jensen-shannon": (jensen_shannon, False),
    "jensen-renyi": (jensen_renyi, True),
}
