"""One test per acceptance criterion, each reporting a PASS/FAIL line.

Criterion 8 trains ten 200-epoch runs and takes roughly ten minutes.
"""

import math
import time

import numpy as np
import pytest

from renyigan_lab import autodiff as ad
from renyigan_lab import experiments as X
from renyigan_lab import measures as M
from renyigan_lab import oracle as O
from renyigan_lab import suite as S
from renyigan_lab.autodiff import Tape
from renyigan_lab.cli import main
from renyigan_lab.config import dump_document, preset_document
from renyigan_lab.distributions import DiscreteDist
from renyigan_lab.fid import GaussianFit, frechet_distance
from renyigan_lab.losses import (
    LkganParams,
    gan_disc_loss,
    lkgan_disc_loss,
    lkgan_gen_loss,
    renyigan_gen_loss,
)
from renyigan_lab.nn import Layer, Mlp, input_gradient_norm_sq, input_gradients

from conftest import ACCEPTANCE_LINES, central_difference, relative_error

LOG2 = math.log(2.0)


def report(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def random_discrete_pairs(n, seed, size=(2, 12), floor=1e-3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        k = int(rng.integers(*size, endpoint=True))
        p, q = (rng.uniform(floor, 1.0, k) for _ in range(2))
        out.append((DiscreteDist(p / p.sum()), DiscreteDist(q / q.sum())))
    return out


def test_criterion_1_lkgan_identity():
    start = time.perf_counter()
    params = [LkganParams.version(v, k) for v in ("v1", "v2") for k in (1.0, 2.0, 3.0)]
    gaps = [O.verify_lkgan_identity(pair, p).gap for pair in S.random_pairs(20) for p in params]
    seconds = time.perf_counter() - start
    worst = max(gaps)
    report(1, worst < 1e-6 and seconds < 30,
           f"{len(gaps)} cases (20 pairs x v1,v2 x k=1,2,3), max gap {worst:.2e} < 1e-6, "
           f"{seconds:.1f} s < 30 s")


def test_criterion_2_renyigan_identity():
    start = time.perf_counter()
    pairs = S.random_pairs(20)
    gaps = [O.verify_renyigan_identity(pair, a).gap for pair in pairs for a in (0.5, 2, 3, 9)]
    equal = [abs(O.verify_renyigan_identity(O.DensityPair(pair.p_x, pair.p_x), a).lhs + 2 * LOG2)
             for pair in pairs for a in (0.5, 2, 3, 9)]
    seconds = time.perf_counter() - start
    ok = max(gaps) < 1e-6 and max(equal) < 1e-9 and seconds < 30
    report(2, ok, f"max gap {max(gaps):.2e} < 1e-6, equal-pair |lhs + 2 log 2| "
                  f"{max(equal):.2e} < 1e-9, {seconds:.1f} s < 30 s")


def test_criterion_3_limits():
    eps = 1e-4
    rng = np.random.default_rng(33)
    dens = [(S.random_gaussian(rng), S.random_gaussian(rng)) for _ in range(5)]
    dens += [(S.random_histogram(rng), S.random_histogram(rng)) for _ in range(5)]
    pairs = random_discrete_pairs(20, 34) + dens
    gaps = {}
    for name, measure in (("cross-entropy", M.renyi_cross_entropy),
                          ("renyi-kl", M.renyi_divergence), ("jr-jsd", M.jensen_renyi)):
        gaps[name] = max(M.order_one_limit(measure, p, q, eps)["gap"] for p, q in pairs)
    loss = []
    for pair in S.random_pairs(10):
        loss.append(O.verify_generator_limit(O.optimal_disc_gan(pair), pair, eps, margin=None))
        half = lambda x: np.full(np.shape(x), 0.5)  # noqa: E731
        loss.append(O.verify_generator_limit(half, pair, eps))
    for p, q in pairs[:20]:
        d = rng.uniform(0.05, 0.95, p.dimension)
        loss.append(O.verify_generator_limit(d, O.DensityPair(p, q), eps))
    gaps["generator-loss"] = max(loss)
    report(3, all(g < 1e-3 for g in gaps.values()),
           "gaps at eps=1e-4: " + ", ".join(f"{k} {v:.2e}" for k, v in gaps.items()) + " (< 1e-3)")


def test_criterion_4_monotonicity():
    worst = max(O.monotonicity_violation(p, q) for p, q in random_discrete_pairs(100, 44, (2, 64)))
    report(4, worst <= 1e-9, f"100 pairs, largest increase of h_alpha {worst:.2e} <= 1e-9")


def test_criterion_5_condition_number():
    excess, peaks = [], []
    for alpha in (2.0, 3.0, 9.0):
        bound = S.kappa_bound(1.0, 0.5, alpha, 0.5 ** (alpha - 1.0))
        excess.append(float(np.max(S.condition_sweep(alpha) - bound)))
    for alpha in (0.5, 1.5):
        peaks.append(float(np.max(S.condition_sweep(alpha))))
    ok = max(excess) <= 1e-9 and min(peaks) > 1e6
    report(5, ok, f"alpha 2,3,9: max(kappa - bound) {max(excess):.2e} <= 1e-9; "
                  f"alpha 0.5,1.5: peak kappa {min(peaks):.2e} > 1e6 by q(x0) = 1e-12")


def _loss_trials(rng, n):
    losses = [
        lambda r, f: lkgan_disc_loss(r, f, LkganParams.v1(2)),
        lambda r, f: lkgan_gen_loss(f, LkganParams.v2(3)),
        gan_disc_loss,
        lambda r, f: renyigan_gen_loss(f, 3.0),
        lambda r, f: renyigan_gen_loss(f, 0.5),
    ]
    errors = []
    for i in range(n):
        loss = losses[i % len(losses)]
        real, fake = rng.uniform(0.05, 0.95, 8), rng.uniform(0.05, 0.95, 8)
        tape = Tape()
        r, f = tape.leaf(real), tape.leaf(fake)
        g = np.concatenate(tape.backward(loss(r, f), [r, f]))
        fd = np.concatenate([
            central_difference(lambda v: float(loss(v, fake).value), real),
            central_difference(lambda v: float(loss(real, v).value), fake)])
        errors.append(relative_error(g, fd))
    return errors


def _random_disc(rng):
    return Mlp([Layer(rng.normal(0, 0.7, (2, 5)), rng.normal(0, 0.3, 5), "tanh"),
                Layer(rng.normal(0, 0.7, (5, 4)), rng.normal(0, 0.3, 4), "tanh"),
                Layer(rng.normal(0, 0.7, (4, 1)), rng.normal(0, 0.3, 1), "sigmoid")])


def _penalty_trials(rng, n):
    errors = []
    for _ in range(n):
        net, x = _random_disc(rng), rng.normal(size=(5, 2))
        norms, fp = input_gradient_norm_sq(net, x)
        grads = fp.tape.backward(ad.mean(norms), fp.params)
        for i, (param, g) in enumerate(zip(net.parameters(), grads)):
            def f(value, i=i):
                params = [p.copy() for p in net.parameters()]
                params[i] = value
                trial = net.copy()
                trial.set_parameters(params)
                return float(np.mean(np.sum(input_gradients(trial, x) ** 2, axis=1)))
            errors.append(relative_error(g, central_difference(f, param)))
    return errors


def test_criterion_6_gradient_integrity():
    rng = np.random.default_rng(66)
    first = _loss_trials(rng, 100)
    second = _penalty_trials(rng, 30)
    ok1 = sum(e < 1e-5 for e in first)
    ok2 = sum(e < 1e-4 for e in second)
    report(6, ok1 == len(first) and ok2 == len(second),
           f"first-order {ok1}/{len(first)} within 1e-5 (worst {max(first):.1e}); "
           f"double-backprop {ok2}/{len(second)} within 1e-4 (worst {max(second):.1e})")


def test_criterion_7_fid():
    rng = np.random.default_rng(77)
    ident, shift, diag = [], [], []
    for _ in range(50):
        d = int(rng.integers(1, 17))
        a = rng.normal(size=(d, d))
        fit = GaussianFit(rng.normal(size=d), a @ a.T)
        ident.append(frechet_distance(fit, fit))
        mu = rng.normal(size=d)
        shift.append(abs(frechet_distance(GaussianFit(np.zeros(d), np.eye(d)),
                                          GaussianFit(mu, np.eye(d))) - mu @ mu))
        v1, v2 = rng.uniform(0.01, 10, d), rng.uniform(0.01, 10, d)
        expected = np.sum((np.sqrt(v1) - np.sqrt(v2)) ** 2)
        diag.append(abs(frechet_distance(GaussianFit(np.zeros(d), np.diag(v1)),
                                         GaussianFit(np.zeros(d), np.diag(v2))) - expected))
    ok = max(ident) < 1e-9 and max(shift) < 1e-8 and max(diag) < 1e-9
    report(7, ok, f"identity {max(ident):.1e} (< 1e-9), mean shift {max(shift):.1e} (< 1e-8), "
                  f"diagonal {max(diag):.1e} (< 1e-9)")


@pytest.mark.slow
def test_criterion_8_desk_scale_training():
    start = time.perf_counter()
    runs = X.stability_comparison()
    seconds = time.perf_counter() - start
    renyi, base = runs["renyigan-alpha"], runs["dcgan-baseline"]
    med_r, med_b = X.median_modes(renyi), X.median_modes(base)
    finite = all(o.finite for o in renyi + base)
    converged = sum(o.converged for o in renyi)
    part_a = med_r >= med_b
    part_b = finite and converged >= X.MIN_CONVERGED
    detail = (f"(a) {'pass' if part_a else 'fail'}: median modes_hit RenyiGAN {med_r:g} "
              f"[{' '.join(str(o.modes_hit) for o in renyi)}] vs baseline {med_b:g} "
              f"[{' '.join(str(o.modes_hit) for o in base)}]; "
              f"(b) {'pass' if part_b else 'fail'}: all FID finite {finite}, final < "
              f"{X.FID_RATIO} x first on {converged}/5 RenyiGAN seeds; {seconds / 60:.1f} min < 20")
    report(8, part_a and part_b and seconds < 1200, detail)


def test_criterion_9_determinism(tmp_path, capsys):
    doc = preset_document("renyigan-sweep")
    doc["training"].update(epochs=3, batch_size=16, pool_size=512, fid_samples=256, hidden=16)
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(dump_document(doc))
    same = []
    for d in ("a", "b"):
        assert main(["train", str(cfg), "--seed", "123", "--out-dir", str(tmp_path / d)]) == 0
        assert main(["verify", "--csv", str(tmp_path / d / "verify.csv")]) == 0
    capsys.readouterr()
    for name in ("runrecord.csv", "runrecord.json", "verify.csv"):
        same.append((tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes())
    report(9, all(same), f"train and verify repeated with seed 123: {sum(same)}/3 artifacts "
                         "byte-identical")
