"""Fréchet distance between Gaussian fits of two sample sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientSamples, MatrixSqrtNonConvergence

EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class GaussianFit:
    mean: np.ndarray
    cov: np.ndarray

    @property
    def dimension(self) -> int:
        return self.mean.size


def _psd_floor(cov: np.ndarray, floor: float = EIG_FLOOR) -> np.ndarray:
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    out = (v * np.maximum(w, floor)) @ v.T
    return 0.5 * (out + out.T)


def fit_gaussian(samples) -> GaussianFit:
    """Sample mean and unbiased covariance, symmetrized and eigenvalue-floored."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, d = x.shape
    # two points already give an unbiased (if singular) covariance
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    return GaussianFit(mean, _psd_floor(cov))


def sqrtm_psd(a: np.ndarray) -> np.ndarray:
    """Symmetric square root of a symmetric PSD matrix via eigendecomposition."""
    a = 0.5 * (a + a.T)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise MatrixSqrtNonConvergence(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise MatrixSqrtNonConvergence("non-finite eigenvalues")
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.T


def product_sqrt(cov1: np.ndarray, cov2: np.ndarray) -> np.ndarray:
    """(S2 C1 S2)^(1/2) with S2 = C2^(1/2); its trace equals Tr((C1 C2)^(1/2))."""
    s2 = sqrtm_psd(cov2)
    inner = s2 @ cov1 @ s2
    return sqrtm_psd(0.5 * (inner + inner.T))


def covmean_trace(cov1: np.ndarray, cov2: np.ndarray) -> float:
    """Tr((C1 C2)^(1/2)) as the nuclear norm of C1^(1/2) C2^(1/2).

    Avoids squaring small eigenvalues, which product_sqrt does when C1 ~ C2.
    """
    return float(np.linalg.svd(sqrtm_psd(cov1) @ sqrtm_psd(cov2), compute_uv=False).sum())


def frechet_distance_raw(f1: GaussianFit, f2: GaussianFit) -> float:
    if f1.dimension != f2.dimension:
        raise DimensionMismatch(f"dimensions differ: {f1.dimension} vs {f2.dimension}")
    diff = f1.mean - f2.mean
    trace_sum = np.trace(f1.cov) + np.trace(f2.cov)
    return float(diff @ diff + trace_sum - 2.0 * covmean_trace(f1.cov, f2.cov))


def frechet_distance(f1: GaussianFit, f2: GaussianFit) -> float:
    """||m1 - m2||^2 + Tr(C1 + C2 - 2 (C1 C2)^(1/2)), clipped at 0."""
    return max(0.0, frechet_distance_raw(f1, f2))


def fid_from_samples(a, b) -> float:
    return frechet_distance(fit_gaussian(a), fit_gaussian(b))
