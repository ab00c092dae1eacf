"""The desk-scale stability comparison between RényiGAN and the DCGAN baseline."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .config import preset
from .trainer import train

# The first five seeds of the paper's ten-seed MNIST protocol.
STABILITY_SEEDS = (123, 5005, 1600, 199621, 60677)
STABILITY_PRESETS = ("renyigan-alpha", "dcgan-baseline")
# Frozen after the calibration runs: final FID must fall below this
# fraction of the epoch-1 FID.
FID_RATIO = 0.25
MIN_CONVERGED = 3


@dataclass(frozen=True)
class RunOutcome:
    preset: str
    seed: int
    fids: tuple[float, ...]
    modes_hit: int
    high_quality_fraction: float
    seconds: float

    @property
    def finite(self) -> bool:
        return all(math.isfinite(f) for f in self.fids)

    @property
    def converged(self) -> bool:
        return self.finite and self.fids[-1] < FID_RATIO * self.fids[0]


def run_one(name: str, seed: int, epochs: int = 200) -> RunOutcome:
    start = time.perf_counter()
    record = train(preset(name, seed=seed, epochs=epochs)).record
    return RunOutcome(name, seed, tuple(float(f) for f in record.fids()),
                      int(record.summary["modes_hit"]),
                      float(record.summary["high_quality_fraction"]),
                      time.perf_counter() - start)


def stability_comparison(seeds=STABILITY_SEEDS, epochs: int = 200, progress=None):
    """Train both presets on every seed; returns {preset: [RunOutcome, ...]}."""
    out = {name: [] for name in STABILITY_PRESETS}
    for seed in seeds:
        for name in STABILITY_PRESETS:
            outcome = run_one(name, seed, epochs)
            out[name].append(outcome)
            if progress is not None:
                progress(outcome)
    return out


def median_modes(outcomes) -> float:
    return float(np.median([o.modes_hit for o in outcomes]))
