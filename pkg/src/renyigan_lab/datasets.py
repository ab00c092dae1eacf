"""Synthetic 2-D targets: Gaussian rings, grids and single Gaussians."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import WrongDatasetKind

KINDS = ("ring", "grid", "single-gaussian")


@dataclass(frozen=True)
class SyntheticDataset:
    kind: str = "ring"
    n_modes: int = 8
    radius: float = 2.0
    rows: int = 5
    cols: int = 5
    spacing: float = 2.0
    mode_std: float = 0.05
    mean: tuple = (0.0, 0.0)
    cov: tuple = ((1.0, 0.0), (0.0, 1.0))
    _centers: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dataset kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "single-gaussian":
            if not self.mode_std > 0:
                raise ValueError("mode_std must be > 0")
            centers = self._make_centers()
            if len(np.unique(np.round(centers, 12), axis=0)) != len(centers):
                raise ValueError("mixture modes must be distinct")
            object.__setattr__(self, "_centers", centers)
        else:
            cov = np.asarray(self.cov, dtype=float)
            if cov.shape != (len(self.mean),) * 2 or np.any(np.linalg.eigvalsh(cov) <= 0):
                raise ValueError("single-gaussian covariance must be positive definite")

    def _make_centers(self) -> np.ndarray:
        if self.kind == "ring":
            if self.n_modes < 1 or not self.radius > 0:
                raise ValueError("ring needs n_modes >= 1 and radius > 0")
            angles = 2 * np.pi * np.arange(self.n_modes) / self.n_modes
            return self.radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid needs rows, cols >= 1")
        xs = (np.arange(self.cols) - (self.cols - 1) / 2) * self.spacing
        ys = (np.arange(self.rows) - (self.rows - 1) / 2) * self.spacing
        return np.array([(x, y) for y in ys for x in xs])

    @property
    def is_mixture(self) -> bool:
        return self.kind != "single-gaussian"

    @property
    def dimension(self) -> int:
        return len(self.mean) if self.kind == "single-gaussian" else 2

    @property
    def centers(self) -> np.ndarray:
        if not self.is_mixture:
            raise WrongDatasetKind("single-gaussian has no modes")
        return self._centers

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "single-gaussian":
            return rng.multivariate_normal(np.asarray(self.mean, float), np.asarray(self.cov, float), size=n)
        idx = rng.integers(0, len(self._centers), size=n)
        return self._centers[idx] + self.mode_std * rng.standard_normal((n, 2))

    def to_dict(self) -> dict:
        if self.kind == "ring":
            return {"kind": "ring", "n_modes": self.n_modes, "radius": self.radius, "mode_std": self.mode_std}
        if self.kind == "grid":
            return {"kind": "grid", "rows": self.rows, "cols": self.cols, "spacing": self.spacing,
                    "mode_std": self.mode_std}
        return {"kind": "single-gaussian", "mean": list(self.mean), "cov": [list(r) for r in self.cov]}


def ring(n_modes: int = 8, radius: float = 2.0, mode_std: float = 0.05) -> SyntheticDataset:
    return SyntheticDataset("ring", n_modes=n_modes, radius=radius, mode_std=mode_std)


def grid(rows: int = 5, cols: int = 5, spacing: float = 2.0, mode_std: float = 0.05) -> SyntheticDataset:
    return SyntheticDataset("grid", rows=rows, cols=cols, spacing=spacing, mode_std=mode_std)


def single_gaussian(mean=(0.0, 0.0), cov=((1.0, 0.0), (0.0, 1.0))) -> SyntheticDataset:
    return SyntheticDataset("single-gaussian", mean=tuple(mean), cov=tuple(tuple(r) for r in cov))


def mode_coverage(samples, dataset: SyntheticDataset, hit_fraction: float = 0.01) -> tuple[int, float]:
    """Modes hit and the fraction of high-quality samples.

    A sample is high quality when every coordinate lies within 3 mode_std of
    its nearest mode; a mode counts as hit when at least ``hit_fraction`` of
    all samples are high-quality samples of that mode.
    """
    if not dataset.is_mixture:
        raise WrongDatasetKind("mode coverage needs a mixture dataset")
    x = np.asarray(samples, dtype=float)
    centers = dataset.centers
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    nearest = d2.argmin(axis=1)
    offset = np.abs(x - centers[nearest]).max(axis=1)
    good = offset <= 3.0 * dataset.mode_std
    counts = np.bincount(nearest[good], minlength=len(centers))
    modes_hit = int(np.sum(counts >= hit_fraction * len(x)))
    return modes_hit, float(good.mean())
