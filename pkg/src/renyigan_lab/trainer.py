"""Alternating discriminator/generator training on synthetic 2-D targets."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import autodiff as ad
from .autodiff import Tape
from .config import TrainConfig, config_from_document, config_to_document
from .datasets import mode_coverage
from .errors import NumericalDivergence, SaturatedDiscriminator
from .fid import fit_gaussian, frechet_distance_raw
from .losses import (
    CLAMP,
    gan_disc_loss,
    gradient_penalty,
    lkgan_disc_loss,
    lkgan_gen_loss,
    renyigan_gen_loss,
    schedule_alpha,
    shannon_gen_loss,
)
from .nn import AdamState, Mlp, adam_step, save_checkpoint

# Column order of runrecord.csv.  Wall-clock time is kept out of the
# deterministic artifacts and written to timing.csv instead.
CSV_COLUMNS = ("epoch", "alpha_in_effect", "disc_loss", "gen_loss", "penalty_value", "fid",
               "fid_clipped", "clamp_activations")
TIMING_COLUMNS = ("epoch", "wall_ms")


@dataclass
class EpochRow:
    epoch: int
    alpha_in_effect: float | None
    disc_loss: float
    gen_loss: float
    penalty_value: float
    fid: float
    fid_clipped: bool
    clamp_activations: int
    wall_ms: float = 0.0


@dataclass
class RunRecord:
    config: TrainConfig
    rows: list[EpochRow] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    code_version: str = __version__

    def fids(self) -> np.ndarray:
        return np.array([r.fid for r in self.rows])

    def min_fid_row(self) -> EpochRow:
        return min(self.rows, key=lambda r: (r.fid, r.epoch))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([
                r.epoch, "" if r.alpha_in_effect is None else repr(r.alpha_in_effect),
                repr(r.disc_loss), repr(r.gen_loss), repr(r.penalty_value), repr(r.fid),
                int(r.fid_clipped), r.clamp_activations,
            ])
        return buf.getvalue()

    def timing_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(TIMING_COLUMNS)
        for r in self.rows:
            writer.writerow([r.epoch, f"{r.wall_ms:.3f}"])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "code_version": self.code_version,
            "config": config_to_document(self.config),
            "columns": list(CSV_COLUMNS),
            "rows": [[getattr(r, c) for c in CSV_COLUMNS] for r in self.rows],
            "summary": self.summary,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        doc = json.loads(text)
        rows = [EpochRow(**dict(zip(CSV_COLUMNS, row))) for row in doc["rows"]]
        return cls(config_from_document(doc["config"]), rows, doc["summary"], doc["code_version"])

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "runrecord.csv").write_bytes(self.to_csv().encode())
        (out / "runrecord.json").write_bytes(self.to_json().encode())
        (out / "timing.csv").write_bytes(self.timing_csv().encode())


@dataclass
class TrainResult:
    record: RunRecord
    generator: Mlp
    discriminator: Mlp

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        self.record.write(out)
        save_checkpoint(self.generator, out / "generator.json")
        save_checkpoint(self.discriminator, out / "discriminator.json")


def _streams(seed: int) -> dict[str, np.random.Generator]:
    names = ("disc_init", "gen_init", "pool", "batches", "eval")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {n: np.random.default_rng(s) for n, s in zip(names, children)}


def _uses_logs(cfg: TrainConfig) -> bool:
    return cfg.loss_family != "lkgan"


class Trainer:
    """One deterministic training run; see :func:`train`."""

    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        rng = _streams(cfg.seed)
        self.rng = rng
        dim = cfg.dataset.dimension
        self.disc = Mlp.discriminator(dim, rng["disc_init"], cfg.hidden, cfg.depth)
        self.gen = Mlp.generator(cfg.latent_dim, dim, rng["gen_init"], cfg.hidden, cfg.depth)
        hyper = dict(learning_rate=cfg.optimizer.learning_rate, beta1=cfg.optimizer.beta1,
                     beta2=cfg.optimizer.beta2, epsilon=cfg.optimizer.epsilon)
        self.disc_opt = AdamState.for_params(self.disc.parameters(), **hyper)
        self.gen_opt = AdamState.for_params(self.gen.parameters(), **hyper)
        self.pool = cfg.dataset.sample(cfg.pool_size, rng["pool"])
        self.real_fit = fit_gaussian(self.pool)
        self.eval_z = rng["eval"].standard_normal((cfg.fid_samples, cfg.latent_dim))
        self.good = (self.gen.copy(), self.disc.copy())

    # losses --------------------------------------------------------------

    def alpha_for(self, epoch: int) -> float | None:
        cfg = self.cfg
        if cfg.loss_family == "renyigan":
            if cfg.renyigan.alpha_schedule is not None:
                return schedule_alpha(cfg.renyigan.alpha_schedule, epoch, cfg.epochs)
            return cfg.renyigan.alpha
        if cfg.loss_family == "dcgan-baseline":
            return 1.0
        return None

    def _disc_loss(self, d_real, d_fake):
        if self.cfg.loss_family == "lkgan":
            return lkgan_disc_loss(d_real, d_fake, self.cfg.lkgan)
        return gan_disc_loss(d_real, d_fake)

    def _gen_loss(self, d_fake, alpha):
        cfg = self.cfg
        if cfg.loss_family == "lkgan":
            return lkgan_gen_loss(d_fake, cfg.lkgan)
        if cfg.loss_family == "renyigan":
            return renyigan_gen_loss(d_fake, alpha, l1=cfg.renyigan.l1_normalized)
        return shannon_gen_loss(d_fake, l1=cfg.baseline_l1)

    def _check(self, value: float, what: str, epoch: int):
        if not math.isfinite(value) or abs(value) > self.cfg.divergence_threshold:
            raise NumericalDivergence(f"{what} = {value!r} at epoch {epoch}", checkpoint=self.good)

    def _clamped(self, d: np.ndarray) -> int:
        if not _uses_logs(self.cfg):
            return 0
        return int(np.count_nonzero((d < CLAMP) | (d > 1.0 - CLAMP)))

    # steps ---------------------------------------------------------------

    def disc_step(self, real: np.ndarray, fake: np.ndarray) -> tuple[float, float, int]:
        m = len(real)
        tape = Tape()
        fp = self.disc.forward(np.concatenate([real, fake]), tape)
        out = ad.reshape(fp.output, (2 * m,))
        d_real, d_fake = ad.take(out, slice(0, m)), ad.take(out, slice(m, 2 * m))
        loss = self._disc_loss(d_real, d_fake)
        wrt = list(fp.params)
        penalty = 0.0
        if self.cfg.penalty.enabled:
            pen, pfp = gradient_penalty(self.disc, real, self.cfg.penalty, tape)
            penalty = float(pen.value)
            loss = loss + pen
            wrt += pfp.params
        grads = tape.backward(loss, wrt)
        n = len(fp.params)
        if len(wrt) > n:
            grads = [a + b for a, b in zip(grads[:n], grads[n:])]
        adam_step(self.disc_opt, self.disc.parameters(), grads)
        return float(loss.value) - penalty, penalty, self._clamped(out.value)

    def gen_step(self, z: np.ndarray, alpha) -> tuple[float, int]:
        tape = Tape()
        gfp = self.gen.forward(z, tape)
        dfp = self.disc.forward(None, tape, trainable=False, inputs=gfp.output)
        d_fake = ad.reshape(dfp.output, (len(z),))
        loss = self._gen_loss(d_fake, alpha)
        grads = tape.backward(loss, gfp.params)
        adam_step(self.gen_opt, self.gen.parameters(), grads)
        return float(loss.value), self._clamped(d_fake.value)

    # epochs --------------------------------------------------------------

    def evaluate(self) -> tuple[float, bool, np.ndarray]:
        samples = self.gen.predict(self.eval_z)
        if not np.all(np.isfinite(samples)):
            return math.inf, False, samples
        raw = frechet_distance_raw(fit_gaussian(samples), self.real_fit)
        return max(raw, 0.0), raw < 0.0, samples

    def run_epoch(self, epoch: int) -> EpochRow:
        cfg = self.cfg
        start = time.perf_counter()
        alpha = self.alpha_for(epoch)
        m = cfg.batch_size
        order = self.rng["batches"].permutation(cfg.pool_size)
        d_losses, g_losses, pens = [], [], []
        clamps = 0
        for b in range(cfg.pool_size // m):
            z = self.rng["batches"].standard_normal((m, cfg.latent_dim))
            real = self.pool[order[b * m:(b + 1) * m]]
            fake = self.gen.predict(z)
            try:
                d_loss, pen, c = self.disc_step(real, fake)
            except SaturatedDiscriminator as exc:
                raise NumericalDivergence(f"{exc} at epoch {epoch}", checkpoint=self.good) from exc
            self._check(d_loss + pen, "discriminator loss", epoch)
            d_losses.append(d_loss)
            pens.append(pen)
            clamps += c
            if (b + 1) % cfg.disc_steps_per_gen_step == 0:
                g_loss, c = self.gen_step(z, alpha)
                self._check(g_loss, "generator loss", epoch)
                g_losses.append(g_loss)
                clamps += c
        fid, clipped, _ = self.evaluate()
        if not math.isfinite(fid):
            raise NumericalDivergence(f"non-finite generator output at epoch {epoch}",
                                      checkpoint=self.good)
        self.good = (self.gen.copy(), self.disc.copy())
        return EpochRow(
            epoch=epoch, alpha_in_effect=alpha, disc_loss=float(np.mean(d_losses)),
            gen_loss=float(np.mean(g_losses)) if g_losses else math.nan,
            penalty_value=float(np.mean(pens)), fid=fid, fid_clipped=clipped,
            clamp_activations=clamps, wall_ms=1000.0 * (time.perf_counter() - start))

    def summarize(self, record: RunRecord, status: str, message: str = "") -> None:
        summary = {"status": status, "epochs_completed": len(record.rows),
                   "divergence_threshold": self.cfg.divergence_threshold}
        if record.rows:
            best = record.min_fid_row()
            summary.update(min_fid=best.fid, min_fid_epoch=best.epoch,
                           final_fid=record.rows[-1].fid, first_fid=record.rows[0].fid)
        if self.cfg.dataset.is_mixture and status == "completed":
            hit, frac = mode_coverage(self.gen.predict(self.eval_z), self.cfg.dataset)
            summary.update(modes_hit=hit, high_quality_fraction=frac)
        if message:
            summary["message"] = message
        record.summary = summary


def train(cfg: TrainConfig, progress=None) -> TrainResult:
    """Run ``cfg.epochs`` epochs and return the record with the final networks.

    Raises NumericalDivergence on a non-finite or oversized loss; the
    exception carries ``checkpoint`` (the networks at the end of the last
    completed epoch) and ``record`` (the rows completed so far).
    """
    t = Trainer(cfg)
    record = RunRecord(cfg)
    for epoch in range(cfg.epochs):
        try:
            row = t.run_epoch(epoch)
        except NumericalDivergence as exc:
            t.summarize(record, "diverged", str(exc))
            exc.record = record
            raise
        record.rows.append(row)
        if progress is not None:
            progress(row)
    t.summarize(record, "completed")
    return TrainResult(record, t.gen, t.disc)


def equilibrium_probe(cfg: TrainConfig, steps: int = 50) -> tuple[float, float]:
    """Debug hook: train the discriminator with generator samples replaced by
    real samples, then return the classical discriminator loss and the
    L1-normalized Rényi generator loss on a held-out real batch.
    """
    t = Trainer(cfg)
    m = cfg.batch_size
    rng = t.rng["batches"]
    for _ in range(steps):
        real = t.pool[rng.integers(0, cfg.pool_size, m)]
        fake = t.pool[rng.integers(0, cfg.pool_size, m)]
        t.disc_step(real, fake)
    real = t.pool[rng.integers(0, cfg.pool_size, m)]
    fake = t.pool[rng.integers(0, cfg.pool_size, m)]
    d_real, d_fake = t.disc.predict(real).ravel(), t.disc.predict(fake).ravel()
    disc = float(gan_disc_loss(d_real, d_fake).value)
    alpha = cfg.renyigan.alpha if cfg.renyigan is not None else 3.0
    gen = float(renyigan_gen_loss(d_fake, alpha, l1=True).value)
    return disc, gen


__all__ = ["CSV_COLUMNS", "EpochRow", "RunRecord", "TrainResult", "Trainer", "train",
           "equilibrium_probe"]
