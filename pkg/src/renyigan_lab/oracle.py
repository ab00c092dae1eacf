"""Numerical certificates for the analytic results behind LkGAN and RényiGAN.

Each ``verify_*`` function evaluates both sides of an identity along
independent routes: the generator objective is integrated directly from its
own integrand here, while the divergence side is assembled from
:mod:`renyigan_lab.measures`.  Agreement of the two is the evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import measures as M
from .distributions import (
    ContinuousDensity,
    DiscreteDist,
    check_order,
    scaled,
    sum_measure,
)
from .errors import (
    ConstraintViolated,
    DegenerateDenominator,
    IntegralDiverges,
    SaturatedDiscriminator,
    SupportMismatch,
    ZeroDensitySum,
)
from .losses import LkganParams
from .quadrature import DEFAULT_QUADRATURE, Quadrature

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class DensityPair:
    """Data density ``p_x`` and generator density ``p_g`` of the same kind."""

    p_x: DiscreteDist | ContinuousDensity
    p_g: DiscreteDist | ContinuousDensity

    def __post_init__(self):
        if isinstance(self.p_x, DiscreteDist) and isinstance(self.p_g, DiscreteDist):
            if self.p_x.dimension != self.p_g.dimension:
                raise SupportMismatch("discrete pair differs in dimension")
        elif not (isinstance(self.p_x, ContinuousDensity) and isinstance(self.p_g, ContinuousDensity)):
            raise SupportMismatch("pair members must both be discrete or both be 1-D densities")

    @property
    def discrete(self) -> bool:
        return isinstance(self.p_x, DiscreteDist)

    @property
    def window(self) -> tuple[float, float, list[float]]:
        lo = min(self.p_x.support[0], self.p_g.support[0])
        hi = max(self.p_x.support[1], self.p_g.support[1])
        bps = sorted(set(self.p_x.breakpoints) | set(self.p_g.breakpoints)
                     | set(self.p_x.support) | set(self.p_g.support))
        return lo, hi, bps

    def densities(self, x=None):
        """``(p_x, p_g)`` evaluated at ``x`` (ignored for discrete pairs)."""
        if self.discrete:
            return self.p_x.probs, self.p_g.probs
        return self.p_x(x), self.p_g(x)

    def log_densities(self, x=None):
        if self.discrete:
            with np.errstate(divide="ignore"):
                return np.log(self.p_x.probs), np.log(self.p_g.probs)
        return self.p_x.log(x), self.p_g.log(x)

    def integrate(self, f, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
        """Sum (discrete) or integral over the joint window of ``f(x)``."""
        if self.discrete:
            return float(np.sum(f(None)))
        lo, hi, bps = self.window
        return quad(f, lo, hi, bps)[0]


def _callable(d_fn):
    """Arrays of discriminator values (discrete pairs) become index lookups."""
    if callable(d_fn):
        return d_fn
    values = np.asarray(d_fn, dtype=float)
    return lambda idx: values[idx]


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    gap: float


# optimal discriminators --------------------------------------------------------

def _lkgan_dstar(px, pg, a, b):
    s = px + pg
    if np.any(s <= 0):
        raise ZeroDensitySum("p_g + p_x vanishes at an evaluation point")
    return (a * pg + b * px) / s


class RatioDiscriminator:
    """x -> (a p_g(x) + b p_x(x)) / (p_g(x) + p_x(x)).

    ``complement`` evaluates 1 - D as its own ratio, which stays accurate where
    D rounds to 1.  For a discrete pair both take support indices.
    """

    def __init__(self, pair: DensityPair, a: float, b: float):
        self.pair, self.a, self.b = pair, a, b

    def _dens(self, arg):
        if self.pair.discrete:
            return self.pair.p_x.probs[arg], self.pair.p_g.probs[arg]
        x = np.asarray(arg, dtype=float)
        return self.pair.p_x(x), self.pair.p_g(x)

    def __call__(self, arg):
        px, pg = self._dens(arg)
        return _lkgan_dstar(px, pg, self.a, self.b)

    def complement(self, arg):
        px, pg = self._dens(arg)
        return _lkgan_dstar(px, pg, 1.0 - self.a, 1.0 - self.b)


def optimal_disc_lkgan(pair: DensityPair, a: float, b: float) -> RatioDiscriminator:
    return RatioDiscriminator(pair, a, b)


def optimal_disc_gan(pair: DensityPair) -> RatioDiscriminator:
    """x -> p_x(x) / (p_x(x) + p_g(x)), the classical optimal discriminator."""
    return optimal_disc_lkgan(pair, 0.0, 1.0)


# LkGAN --------------------------------------------------------------------------

def lkgan_generator_objective(pair: DensityPair, d_fn, params: LkganParams,
                              quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """E_{p_x}|D - c|^k + E_{p_g}|D - c|^k for a discriminator ``d_fn``."""
    k, c = params.k, params.c
    d_fn = _callable(d_fn)

    def term(which):
        def f(x):
            px, pg = pair.densities(x)
            w = px if which == 0 else pg
            out = np.zeros_like(w, dtype=float)
            live = w > 0
            if np.any(live):
                arg = np.arange(w.size)[live] if pair.discrete else x[live]
                out[live] = w[live] * np.abs(np.asarray(d_fn(arg)) - c) ** k
            return out
        return f

    return pair.integrate(term(0), quad) + pair.integrate(term(1), quad)


def verify_lkgan_identity(pair: DensityPair, params: LkganParams,
                          quad: Quadrature = DEFAULT_QUADRATURE) -> IdentityCheck:
    """Generator loss at the optimal discriminator against the Pearson-Vajda form."""
    if not params.divergence_constraint_holds:
        raise ConstraintViolated(
            f"a - b = {params.a - params.b} but 2(c - b) = {2 * (params.c - params.b)}")
    dstar = optimal_disc_lkgan(pair, params.a, params.b)
    lhs = lkgan_generator_objective(pair, dstar, params, quad)
    rhs = abs(params.c - params.b) ** params.k * M.pearson_vajda(
        sum_measure(pair.p_x, pair.p_g), scaled(pair.p_g, 2.0), params.k, quad)
    return IdentityCheck(lhs, rhs, abs(lhs - rhs))


# RényiGAN -------------------------------------------------------------------------

def _log_power_mean(weight_fn, log_q_fn, order, pair, quad):
    """log of integral of w * q^(order - 1), via log1p / expm1 for order near 1."""
    def f(x):
        w = weight_fn(x)
        out = np.zeros_like(w, dtype=float)
        live = w > 0
        if np.any(live):
            lq = log_q_fn(x, live)
            if order < 1 and np.any(np.isneginf(lq)):
                raise IntegralDiverges("q = 0 where the weight is positive")
            out[live] = w[live] * np.expm1((order - 1.0) * lq)
        return out

    mass = pair.integrate(lambda x: weight_fn(x), quad)
    excess = pair.integrate(f, quad)
    return math.log1p(mass - 1.0 + excess)


def _interior_check(values, margin):
    if np.any(values < margin) or np.any(values > 1.0 - margin):
        raise SaturatedDiscriminator(f"discriminator leaves [{margin}, 1 - {margin}]")


def _d_logs(pair: DensityPair, d_fn, margin):
    """Functions returning log D and log(1 - D) on the live points."""
    d_fn = _callable(d_fn)
    comp = getattr(d_fn, "complement", None)

    def args(x, live):
        return np.arange(live.size)[live] if pair.discrete else x[live]

    def values(x, live):
        d = np.asarray(d_fn(args(x, live)), dtype=float)
        if margin:
            _interior_check(d, margin)
        return d

    def log_d(x, live):
        with np.errstate(divide="ignore"):
            return np.log(values(x, live))

    def log_1md(x, live):
        with np.errstate(divide="ignore"):
            if comp is not None:
                if margin:
                    values(x, live)
                return np.log(np.asarray(comp(args(x, live)), dtype=float))
            return np.log1p(-values(x, live))

    return log_d, log_1md


def renyi_generator_objective(pair: DensityPair, d_fn, alpha: float, *, margin: float = 0.0,
                              quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """-H_alpha(p_x; D) - H_alpha(p_g; 1 - D), integrated directly."""
    alpha = check_order(alpha)
    log_d, log_1md = _d_logs(pair, d_fn, margin)
    wx = lambda x: pair.densities(x)[0]  # noqa: E731
    wg = lambda x: pair.densities(x)[1]  # noqa: E731
    return (_log_power_mean(wx, log_d, alpha, pair, quad)
            + _log_power_mean(wg, log_1md, alpha, pair, quad)) / (alpha - 1.0)


def gan_objective(pair: DensityPair, d_fn, *, margin: float = 0.0,
                  quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """V(D, g) = E_{p_x} log D + E_{p_g} log(1 - D)."""
    log_d, log_1md = _d_logs(pair, d_fn, margin)

    def term(which, logfn):
        def f(x):
            w = pair.densities(x)[which]
            out = np.zeros_like(w, dtype=float)
            live = w > 0
            if np.any(live):
                out[live] = w[live] * logfn(x, live)
            return out
        return f

    return pair.integrate(term(0, log_d), quad) + pair.integrate(term(1, log_1md), quad)


def l1_objective(pair: DensityPair, d_fn, alpha: float, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """|V_alpha(D, g) + 2 log 2|, the two-term absolute-deviation objective."""
    return abs(renyi_generator_objective(pair, d_fn, alpha, quad=quad) + 2.0 * LOG2)


def _dstar_logs(pair: DensityPair):
    """log D* and log(1 - D*) from log densities, exact in Gaussian tails."""
    def logs(x, live):
        lx, lg = pair.log_densities(x)
        lx, lg = lx[live], lg[live]
        lse = np.logaddexp(lx, lg)
        return lx - lse, lg - lse
    return logs


def verify_renyigan_identity(pair: DensityPair, alpha: float,
                             quad: Quadrature = DEFAULT_QUADRATURE) -> IdentityCheck:
    """V_alpha(D*, g) integrated directly against 2 JR_alpha(p_x || p_g) - 2 log 2."""
    alpha = check_order(alpha)
    logs = _dstar_logs(pair)
    wx = lambda x: pair.densities(x)[0]  # noqa: E731
    wg = lambda x: pair.densities(x)[1]  # noqa: E731
    lhs = (_log_power_mean(wx, lambda x, live: logs(x, live)[0], alpha, pair, quad)
           + _log_power_mean(wg, lambda x, live: logs(x, live)[1], alpha, pair, quad)) / (alpha - 1.0)
    rhs = 2.0 * M.jensen_renyi(pair.p_x, pair.p_g, alpha, quad) - 2.0 * LOG2
    return IdentityCheck(lhs, rhs, abs(lhs - rhs))


def check_limit_hypotheses(pair: DensityPair, d_fn, bound: float = 1e12,
                           quad: Quadrature = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """E_{p_x}[1/D] and E_{p_g}[1/(1 - D)]; raises if either is not finite."""
    d_fn = _callable(d_fn)
    comp = getattr(d_fn, "complement", lambda arg: 1.0 - np.asarray(d_fn(arg), dtype=float))

    def term(which):
        def f(x):
            w = pair.densities(x)[which]
            out = np.zeros_like(w, dtype=float)
            live = w > 0
            if np.any(live):
                arg = np.arange(w.size)[live] if pair.discrete else x[live]
                denom = np.asarray((d_fn if which == 0 else comp)(arg), dtype=float)
                if np.any(denom <= 0):
                    raise SaturatedDiscriminator("discriminator hits 0 or 1 where a density is positive")
                out[live] = w[live] / denom
            return out
        return f

    ex, eg = pair.integrate(term(0), quad), pair.integrate(term(1), quad)
    if not (ex < bound and eg < bound):
        raise SaturatedDiscriminator(f"E[1/D] = {ex:.3g}, E[1/(1-D)] = {eg:.3g}")
    return ex, eg


def verify_generator_limit(d_fn, pair: DensityPair, eps: float = 1e-4, margin: float | None = 1e-3,
                           quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """max over alpha in {1 - eps, 1 + eps} of |V_alpha(D, g) - V(D, g)|.

    With a ``margin``, ``d_fn`` must stay inside ``[margin, 1 - margin]``
    wherever a density is positive.  With ``margin=None`` the weaker
    requirement that E[1/D] and E[1/(1 - D)] are finite is checked instead.
    """
    if margin is None:
        check_limit_hypotheses(pair, d_fn, quad=quad)
        margin = 0.0
    base = gan_objective(pair, d_fn, margin=margin, quad=quad)
    return max(abs(renyi_generator_objective(pair, d_fn, a, margin=margin, quad=quad) - base)
               for a in (1.0 - eps, 1.0 + eps))


def verify_cross_entropy_limit(p, q, eps: float = 1e-4, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    return M.order_one_limit(M.renyi_cross_entropy, p, q, eps, quad)["gap"]


def monotonicity_violation(p, q, alphas=(0.1, 0.5, 0.9, 1.1, 2, 3, 5, 9),
                           quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """Largest increase of h_alpha(p; q) between consecutive grid orders (0 if none)."""
    vals = [M.renyi_cross_entropy(p, q, a, quad) for a in sorted(alphas)]
    return max([0.0] + [b - a for a, b in zip(vals, vals[1:])])


def _log_bound_violation(x, lower_factor: float) -> float:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.5):
        raise ValueError("the bound is stated for x > 1/2 only")
    lx = np.log(x)
    lower = (x - 1.0) * (1.0 + lower_factor * (1.0 - x))
    return float(max(0.0, np.max(lower - lx), np.max(lx - (x - 1.0))))


def lemma1_violation(x) -> float:
    """Largest violation of (x-1)(1 + (1-x)/2) <= log x <= x-1 over the given x > 1/2.

    The lower bound as written only holds for x >= 1; on (1/2, 1) the cubic
    Taylor term of log x is negative and pushes log x below it.
    """
    return _log_bound_violation(x, 0.5)


def log_bounds_violation(x) -> float:
    """Largest violation of (x-1)(1 + (1-x)) <= log x <= x-1, valid for all x > 1/2."""
    return _log_bound_violation(x, 1.0)


# stability --------------------------------------------------------------------

def condition_number(p, q_fn, alpha: float, x0, *, q_x0: float | None = None,
                     quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """p(x0) q(x0)^(alpha - 2) / integral of p q^(alpha - 1).

    ``q_fn`` is an array (discrete ``p``, ``x0`` an index) or a callable.
    ``q_x0`` overrides the value of q at ``x0`` only; for a density this is a
    measure-zero change, so the denominator is unaffected.  Returns ``inf``
    when q(x0) = 0 and alpha < 2.
    """
    alpha = check_order(alpha)
    if isinstance(p, DiscreteDist):
        q = np.array(q_fn, dtype=float)
        if q_x0 is not None:
            q[x0] = q_x0
        px0, qx0 = p.probs[x0], q[x0]
        with np.errstate(divide="ignore"):
            denom = float(np.sum(np.where(p.probs > 0, p.probs * q ** (alpha - 1.0), 0.0)))
    else:
        qx0 = float(q_fn(np.array([x0]))[0]) if q_x0 is None else float(q_x0)
        px0 = float(p(np.array([x0], dtype=float))[0])
        lo, hi = p.support

        def f(x):
            px = p(x)
            out = np.zeros_like(px)
            live = px > 0
            with np.errstate(divide="ignore"):
                out[live] = px[live] * np.asarray(q_fn(x[live]), float) ** (alpha - 1.0)
            return out

        denom = quad(f, lo, hi, p.breakpoints)[0]
    if not (np.isfinite(denom) and denom > 0):
        raise DegenerateDenominator(f"integral of p q^(alpha-1) is {denom}")
    if qx0 < 0:
        raise ValueError("q must be non-negative")
    if qx0 == 0:
        if alpha < 2:
            return math.inf
        return px0 / denom if alpha == 2 else 0.0
    return px0 * qx0 ** (alpha - 2.0) / denom
