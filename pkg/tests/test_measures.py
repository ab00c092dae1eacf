import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from renyigan_lab import closed_form as cf
from renyigan_lab import measures as M
from renyigan_lab.distributions import (
    DiagGaussian,
    DiscreteDist,
    evaluable,
    gaussian,
    histogram,
)
from renyigan_lab.errors import (
    AbsoluteContinuityViolation,
    DivisionByZeroSupport,
    IntegralDiverges,
    InvalidDistribution,
    NegativeFunctionValue,
    OrderOutOfRange,
    SupportMismatch,
)

from conftest import discrete_pairs

P = DiscreteDist([0.5, 0.5])
Q = DiscreteDist([0.25, 0.75])
N01, N11 = gaussian(0, 1), gaussian(1, 1)
LEFT = histogram([0.0, 0.5, 1.0], [0.3, 0.7])
RIGHT = histogram([2.0, 3.0], [1.0])
ALL_ORDERS = (0.1, 0.5, 0.9, 1.1, 2.0, 3.0, 5.0, 9.0)


# hand oracles on the two-point pair ------------------------------------------

def test_kl_hand_values():
    assert M.kl_divergence(DiscreteDist([0.3, 0.7]), DiscreteDist([0.3, 0.7])) == 0.0
    expected = 0.5 * math.log(2) + 0.5 * math.log(2 / 3)
    assert M.kl_divergence(P, Q) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.143841, abs=1e-6)


def test_shannon_cross_entropy_hand_values():
    assert M.shannon_cross_entropy(DiscreteDist([1.0]), DiscreteDist([1.0])) == 0.0
    expected = -0.5 * math.log(0.25) - 0.5 * math.log(0.75)
    assert M.shannon_cross_entropy(P, Q) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.836988, abs=1e-6)


def test_pearson_vajda_hand_values():
    assert M.pearson_vajda(P, P, 2) == 0.0
    # sum |q - p|^2 / p = 0.0625/0.5 + 0.0625/0.5
    assert M.pearson_vajda(P, Q, 2) == pytest.approx(0.25, abs=1e-15)
    assert M.pearson_vajda(P, Q, 1) == pytest.approx(0.5, abs=1e-15)


def test_renyi_divergence_hand_value():
    expected = -2 * math.log(math.sqrt(0.5 * 0.25) + math.sqrt(0.5 * 0.75))
    assert M.renyi_divergence(P, Q, 0.5) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.0693365, abs=1e-7)


def test_renyi_cross_entropy_hand_values():
    assert M.renyi_cross_entropy(P, Q, 2) == pytest.approx(math.log(2), abs=1e-15)
    for a in ALL_ORDERS:
        assert M.renyi_cross_entropy(DiscreteDist([1.0]), DiscreteDist([1.0]), a) == 0.0


def test_jensen_shannon_hand_value():
    m = np.array([0.375, 0.625])
    p, q = P.probs, Q.probs
    expected = 0.5 * np.sum(p * np.log(p / m)) + 0.5 * np.sum(q * np.log(q / m))
    assert M.jensen_shannon(P, Q) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.0338221, abs=1e-7)


def test_jensen_renyi_limit_matches_jsd():
    js = M.jensen_shannon(P, Q)
    for a in (1 - 1e-4, 1 + 1e-4):
        assert abs(M.jensen_renyi(P, Q, a) - js) < 1e-4


# Gaussian closed forms ---------------------------------------------------------

def test_gaussian_kl_and_renyi():
    assert M.kl_divergence(N01, N11) == pytest.approx(0.5, abs=1e-10)
    assert M.renyi_divergence(N01, N11, 2) == pytest.approx(1.0, abs=1e-10)
    for a in ALL_ORDERS:
        assert abs(M.renyi_divergence(N01, N01, a)) < 1e-12


def test_gaussian_entropies():
    assert M.shannon_cross_entropy(N01, N01) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-10)
    h2 = 0.5 * math.log(2 * math.pi) + math.log(2) / 2
    assert M.renyi_cross_entropy(N01, N01, 2) == pytest.approx(h2, abs=1e-10)
    assert h2 == pytest.approx(1.265512, abs=1e-6)


def test_functional_examples():
    assert M.renyi_cross_entropy_functional(N01, lambda x: np.ones_like(x), 2) == pytest.approx(0.0, abs=1e-12)
    assert M.renyi_cross_entropy_functional(P, [0.9, 0.9], 2) == pytest.approx(-math.log(0.9), abs=1e-15)
    value = M.renyi_cross_entropy_functional(N01, lambda x: np.full_like(x, 0.5), 3)
    assert value == pytest.approx(math.log(2), abs=1e-10)


def test_functional_rejects_negative_values():
    with pytest.raises(NegativeFunctionValue):
        M.renyi_cross_entropy_functional(N01, lambda x: x, 2)
    with pytest.raises(NegativeFunctionValue):
        M.renyi_cross_entropy_functional(P, [0.5, -0.1], 2)


def _random_gaussian_triple(rng):
    while True:
        mp, mq = rng.uniform(-2, 2, 2)
        vp, vq = rng.uniform(0.3, 3, 2)
        a = rng.choice([rng.uniform(0.05, 0.95), rng.uniform(1.05, 6)])
        # stay clear of the integrability boundary
        if a * vq + (1 - a) * vp > 0.05 and vq + (a - 1) * vp > 0.05:
            return mp, vp, mq, vq, a


def test_quadrature_agrees_with_closed_form_renyi():
    rng = np.random.default_rng(7)
    for _ in range(20):
        mp, vp, mq, vq, a = _random_gaussian_triple(rng)
        ours = M.renyi_divergence(gaussian(mp, vp), gaussian(mq, vq), a)
        assert ours == pytest.approx(cf.renyi_divergence(mp, vp, mq, vq, a), rel=1e-6, abs=1e-9)


def test_quadrature_agrees_with_closed_form_cross_entropies():
    rng = np.random.default_rng(8)
    for _ in range(20):
        mp, vp, mq, vq, a = _random_gaussian_triple(rng)
        p, q = gaussian(mp, vp), gaussian(mq, vq)
        assert M.renyi_cross_entropy(p, q, a) == pytest.approx(
            cf.renyi_cross_entropy(mp, vp, mq, vq, a), rel=1e-8, abs=1e-9)
        assert M.shannon_cross_entropy(p, q) == pytest.approx(
            cf.shannon_cross_entropy(mp, vp, mq, vq), rel=1e-9)
        assert M.kl_divergence(p, q) == pytest.approx(cf.kl(mp, vp, mq, vq), rel=1e-8, abs=1e-12)


def test_variance_condition_raises():
    # alpha var_q + (1 - alpha) var_p = 3 * 0.5 - 2 * 1 < 0
    with pytest.raises(IntegralDiverges):
        M.renyi_divergence(gaussian(0, 1), gaussian(0, 0.5), 3)
    with pytest.raises(IntegralDiverges):
        cf.renyi_divergence(0, 1, 0, 0.5, 3)


def test_diag_gaussians_factorize():
    p = DiagGaussian([0.0, 1.0], [1.0, 2.0])
    q = DiagGaussian([1.0, 0.0], [1.0, 1.5])
    expected = cf.kl(0, 1, 1, 1) + cf.kl(1, 2, 0, 1.5)
    assert M.kl_divergence(p, q) == pytest.approx(expected, rel=1e-9)
    expected = cf.renyi_divergence(0, 1, 1, 1, 2) + cf.renyi_divergence(1, 2, 0, 1.5, 2)
    assert M.renyi_divergence(p, q, 2) == pytest.approx(expected, rel=1e-8)


# disjoint supports ---------------------------------------------------------

def test_disjoint_histograms_reach_log2():
    assert M.jensen_shannon(LEFT, RIGHT) == pytest.approx(math.log(2), abs=1e-12)
    for a in (0.5, 2.0, 3.0, 9.0):
        assert M.jensen_renyi(LEFT, RIGHT, a) == pytest.approx(math.log(2), abs=1e-12)


def test_absolute_continuity_enforced():
    with pytest.raises(AbsoluteContinuityViolation):
        M.kl_divergence(DiscreteDist([0.5, 0.5]), DiscreteDist([1.0, 0.0]))


def test_pearson_vajda_zero_denominator():
    with pytest.raises(DivisionByZeroSupport):
        M.pearson_vajda(DiscreteDist([1.0, 0.0]), DiscreteDist([0.5, 0.5]), 2)


def test_order_validation():
    for bad in (0.0, -1.0, 1.0, 1 + 1e-10, math.nan):
        with pytest.raises(OrderOutOfRange):
            M.renyi_divergence(P, Q, bad)
    with pytest.raises(OrderOutOfRange):
        M.pearson_vajda(P, Q, 0.5)
    M.renyi_divergence(P, Q, 1 + 1e-8)  # just outside the excluded window


def test_invalid_inputs():
    with pytest.raises(InvalidDistribution):
        DiscreteDist([0.5, 0.6])
    with pytest.raises(InvalidDistribution):
        histogram([0, 1, 2], [0.5, 0.4])
    with pytest.raises(InvalidDistribution):
        evaluable(lambda x: x - 0.5, (0.0, 1.0))
    with pytest.raises(SupportMismatch):
        M.kl_divergence(P, DiscreteDist([0.2, 0.3, 0.5]))
    with pytest.raises(SupportMismatch):
        M.kl_divergence(P, N01)


def test_skips_joint_zero_entries():
    p = DiscreteDist([0.5, 0.0, 0.5])
    q = DiscreteDist([0.25, 0.0, 0.75])
    assert M.kl_divergence(p, q) == pytest.approx(M.kl_divergence(P, Q), abs=1e-15)
    assert M.renyi_divergence(p, q, 3) == pytest.approx(M.renyi_divergence(P, Q, 3), abs=1e-14)


def test_evaluable_density_matches_gaussian():
    ev = evaluable(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi), (-12.0, 12.0))
    assert M.renyi_divergence(ev, N01, 2) == pytest.approx(0.0, abs=1e-9)


# properties -----------------------------------------------------------------

DIVERGENCES = [
    lambda p, q: M.kl_divergence(p, q),
    lambda p, q: M.jensen_shannon(p, q),
    lambda p, q: M.pearson_vajda(p, q, 1),
    lambda p, q: M.pearson_vajda(p, q, 2.5),
    lambda p, q: M.renyi_divergence(p, q, 0.5),
    lambda p, q: M.renyi_divergence(p, q, 3),
    lambda p, q: M.jensen_renyi(p, q, 0.5),
    lambda p, q: M.jensen_renyi(p, q, 9),
]


@given(discrete_pairs())
def test_divergences_non_negative(pair):
    p, q = pair
    for d in DIVERGENCES:
        assert d(p, q) >= -1e-9


@given(discrete_pairs())
def test_identity_of_indiscernibles(pair):
    p, q = pair
    tv = 0.5 * np.abs(p.probs - q.probs).sum()
    for d in DIVERGENCES:
        assert abs(d(p, p)) < 1e-9
        if tv > 1e-3:
            assert d(p, q) > 0


@given(discrete_pairs())
def test_cross_entropy_limit(pair):
    p, q = pair
    assert M.order_one_limit(M.renyi_cross_entropy, p, q, 1e-4)["gap"] < 1e-3


@given(discrete_pairs())
def test_renyi_kl_and_jsd_limits(pair):
    p, q = pair
    assert M.order_one_limit(M.renyi_divergence, p, q, 1e-4)["gap"] < 1e-3
    assert M.order_one_limit(M.jensen_renyi, p, q, 1e-4)["gap"] < 1e-3


@given(discrete_pairs())
def test_cross_entropy_monotone_in_order(pair):
    p, q = pair
    values = [M.renyi_cross_entropy(p, q, a) for a in ALL_ORDERS]
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


@given(discrete_pairs())
def test_pearson_vajda_order_two_is_chi_square(pair):
    p, q = pair
    assert M.pearson_vajda(p, q, 2) == pytest.approx(M.chi_square(p, q), rel=1e-12, abs=1e-15)


@given(discrete_pairs(max_size=16))
def test_jensen_shannon_bounded(pair):
    assert M.jensen_shannon(*pair) <= math.log(2) + 1e-12


def test_measure_registry_names():
    assert set(M.MEASURES) == {"kl-divergence", "shannon-cross-entropy", "pearson-vajda",
                               "renyi-divergence", "renyi-cross-entropy", "jensen-shannon",
                               "jensen-renyi"}


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
def test_measures_are_thread_safe(alpha):
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(4) as pool:
        values = list(pool.map(lambda _: M.renyi_divergence(N01, N11, alpha), range(8)))
    assert len(set(values)) == 1
