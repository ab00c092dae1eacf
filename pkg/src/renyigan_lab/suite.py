"""Built-in verification suite run by ``renyigan-lab verify``.

Each check returns a list of non-negative gaps; a check passes when its
largest gap is within the tolerance.  Inputs come from a fixed seed so the
printed table is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import measures as M
from . import oracle as O
from .distributions import DiscreteDist, gaussian, histogram
from .losses import LOG2, LkganParams

SUITE_SEED = 20240601
LIMIT_EPS = 1e-6
MONOTONE_ALPHAS = (0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2, 3, 5, 9)
KAPPA_SWEEP = np.logspace(math.log10(0.5), -12, 60)


def random_gaussian(rng: np.random.Generator):
    return gaussian(rng.uniform(-1, 1), rng.uniform(0.5, 2.0))


def random_histogram(rng: np.random.Generator, bins: int = 8, lo: float = -3.0, hi: float = 3.0):
    return histogram(np.linspace(lo, hi, bins + 1), rng.dirichlet(np.ones(bins)))


def random_discrete(rng: np.random.Generator, n: int = 6) -> DiscreteDist:
    return DiscreteDist(rng.dirichlet(np.ones(n)))


def random_pairs(n: int, seed: int = SUITE_SEED) -> list[O.DensityPair]:
    """Alternating Gaussian and histogram pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        make = random_gaussian if i % 2 == 0 else random_histogram
        out.append(O.DensityPair(make(rng), make(rng)))
    return out


def kappa_bound(px0: float, q_max: float, alpha: float, denom: float) -> float:
    return px0 * q_max ** (alpha - 2.0) / denom


def condition_sweep(alpha: float, q_levels=KAPPA_SWEEP) -> np.ndarray:
    """kappa at x0 = 0.5 for p uniform on [0, 1] and q = 0.5 away from x0."""
    p = histogram([0.0, 1.0], [1.0])
    q_fn = lambda x: np.full(np.shape(x), 0.5)  # noqa: E731
    return np.array([O.condition_number(p, q_fn, alpha, 0.5, q_x0=float(v)) for v in q_levels])


def condition_gaps(alpha: float) -> list[float]:
    kappas = condition_sweep(alpha)
    if alpha >= 2:
        bound = kappa_bound(1.0, 0.5, alpha, 0.5 ** (alpha - 1.0))
        return [max(0.0, float(k - bound)) for k in kappas]
    # below order 2 the sweep must blow up past 1e6
    return [0.0 if np.max(kappas) > 1e6 else math.inf]


# checks ------------------------------------------------------------------------

def _lkgan_identity(n_pairs):
    gaps = []
    for pair in random_pairs(n_pairs):
        for version in ("v1", "v2"):
            for k in (1.0, 2.0, 3.0):
                gaps.append(O.verify_lkgan_identity(pair, LkganParams.version(version, k)).gap)
    return gaps


def _renyi_identity(n_pairs):
    return [O.verify_renyigan_identity(pair, a).gap
            for pair in random_pairs(n_pairs) for a in (0.5, 2.0, 3.0, 9.0)]


def _renyi_equal_pair(n_pairs):
    gaps = []
    for pair in random_pairs(n_pairs):
        same = O.DensityPair(pair.p_x, pair.p_x)
        for a in (0.5, 2.0, 3.0, 9.0):
            gaps.append(abs(O.verify_renyigan_identity(same, a).lhs + 2 * LOG2))
    return gaps


def _limit(measure):
    def run(n_pairs):
        rng = np.random.default_rng(SUITE_SEED + 1)
        pairs = [(random_gaussian(rng), random_gaussian(rng)) for _ in range(n_pairs)]
        pairs += [(random_discrete(rng), random_discrete(rng)) for _ in range(n_pairs)]
        return [M.order_one_limit(measure, p, q, LIMIT_EPS)["gap"] for p, q in pairs]
    return run


def _generator_limit(n_pairs):
    gaps = []
    rng = np.random.default_rng(SUITE_SEED + 2)
    for pair in random_pairs(n_pairs):
        gaps.append(O.verify_generator_limit(O.optimal_disc_gan(pair), pair, LIMIT_EPS, margin=None))
    for _ in range(n_pairs):
        pair = O.DensityPair(random_discrete(rng), random_discrete(rng))
        d = rng.uniform(0.05, 0.95, pair.p_x.dimension)
        gaps.append(O.verify_generator_limit(d, pair, LIMIT_EPS))
    return gaps


def _monotonicity(n_pairs):
    rng = np.random.default_rng(SUITE_SEED + 3)
    return [O.monotonicity_violation(random_discrete(rng), random_discrete(rng), MONOTONE_ALPHAS)
            for _ in range(5 * n_pairs)]


def _lemma1(_n_pairs):
    return [O.log_bounds_violation(np.linspace(0.5 + 1e-9, 50.0, 100001))]


def _condition_number(_n_pairs):
    return [g for a in (0.5, 1.5, 2.0, 3.0, 9.0) for g in condition_gaps(a)]


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    run: Callable[[int], list]


CHECKS = (
    Check("lkgan-identity", "LkGAN loss at D* equals |c-b|^k Pearson-Vajda (v1, v2; k = 1, 2, 3)",
          _lkgan_identity),
    Check("renyi-identity", "RényiGAN loss at D* equals 2 JR_alpha - 2 log 2", _renyi_identity),
    Check("renyi-equal-pair", "RényiGAN loss at D* is -2 log 2 when p_g = p_x", _renyi_equal_pair),
    Check("cross-entropy-limit", "h_alpha -> Shannon cross-entropy as alpha -> 1",
          _limit(M.renyi_cross_entropy)),
    Check("renyi-kl-limit", "D_alpha -> KL as alpha -> 1", _limit(M.renyi_divergence)),
    Check("jr-jsd-limit", "JR_alpha -> JSD as alpha -> 1", _limit(M.jensen_renyi)),
    Check("generator-limit", "RényiGAN loss -> classical GAN loss as alpha -> 1", _generator_limit),
    Check("monotonicity", "h_alpha is non-increasing in alpha", _monotonicity),
    Check("log-bounds", "(x-1)(1+(1-x)) <= log x <= x-1 for x > 1/2", _lemma1),
    Check("condition-number", "kappa bounded for alpha >= 2, unbounded for alpha < 2",
          _condition_number),
)
CHECK_NAMES = tuple(c.name for c in CHECKS)


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    max_gap: float
    passed: bool


def run_suite(tolerance: float = 1e-5, only=None, n_pairs: int = 4) -> list[CheckResult]:
    selected = CHECKS if not only else [c for c in CHECKS if c.name in set(only)]
    unknown = set(only or ()) - set(CHECK_NAMES)
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(sorted(unknown))}")
    results = []
    for check in selected:
        gaps = check.run(n_pairs)
        worst = float(max(gaps))
        results.append(CheckResult(check.name, len(gaps), worst, worst <= tolerance))
    return results
