"""Command-line entry point: ``renyigan-lab {train,verify,measure,fid,sweep}``.

Exit codes: 0 ok, 1 config or parse error, 2 numerical divergence,
3 verification failure.  Human summaries go to stdout; machine artifacts are
written to files only.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import PRESETS, load_config
from .distributions import DiscreteDist, gaussian, histogram
from .errors import ConfigInvalid, LabError, NumericalDivergence, SpecParseError
from .fid import fit_gaussian, frechet_distance
from .measures import MEASURES
from .nn import save_checkpoint
from .suite import CHECK_NAMES, CHECKS, run_suite
from .trainer import train

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_VERIFY = 0, 1, 2, 3
THREADS_ENV = "RENYIGAN_LAB_THREADS"
SWEEP_COLUMNS = ("seed", "status", "epochs_completed", "first_fid", "min_fid", "min_fid_epoch",
                 "final_fid", "modes_hit", "high_quality_fraction")
VERIFY_COLUMNS = ("check", "cases", "max_gap", "tolerance", "passed")

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_GAUSS_RE = re.compile(rf"^N\(\s*({_NUMBER})\s*,\s*({_NUMBER})\s*\)$")
_VECTOR_RE = re.compile(rf"^\[\s*{_NUMBER}(?:\s*,\s*{_NUMBER})*\s*\]$")


def fmt(x: float) -> str:
    """Values are printed with 12 significant digits."""
    return format(float(x), ".12g")


# distribution specs -----------------------------------------------------------

def parse_dist(spec: str):
    """``N(mean,variance)``, an inline probability vector ``[p1,p2,...]``, or a
    CSV histogram file with columns ``left,right,mass``.
    """
    text = spec.strip()
    m = _GAUSS_RE.match(text)
    if m:
        return gaussian(float(m.group(1)), float(m.group(2)))
    if _VECTOR_RE.match(text):
        return DiscreteDist([float(v) for v in text[1:-1].split(",")])
    path = Path(text)
    if not path.is_file():
        raise SpecParseError(f"cannot parse distribution spec {spec!r}: expected N(m,v), "
                             "[p1,...,pn] or a CSV histogram path")
    return _read_histogram(path)


def _read_histogram(path: Path):
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise SpecParseError(f"{path}: empty histogram file")
    if [c.strip() for c in rows[0]] == ["left", "right", "mass"]:
        rows = rows[1:]
    try:
        table = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise SpecParseError(f"{path}: non-numeric entry ({exc})") from None
    if table.ndim != 2 or table.shape[1] != 3 or len(table) == 0:
        raise SpecParseError(f"{path}: expected rows of left,right,mass")
    left, right, mass = table.T
    if np.any(left[1:] != right[:-1]):
        raise SpecParseError(f"{path}: bins must be contiguous (right edge = next left edge)")
    return histogram(np.append(left, right[-1]), mass)


def read_samples(path) -> np.ndarray:
    """Numeric CSV of samples, one row per sample; a non-numeric header row is skipped."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from None
    try:
        [float(c) for c in rows[0]]
    except (ValueError, IndexError):
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise SpecParseError(f"{path}: non-numeric sample ({exc})") from None
    if data.ndim != 2 or data.size == 0:
        raise SpecParseError(f"{path}: expected a rectangular table of samples")
    return data


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(buf.getvalue().encode())


# subcommands ------------------------------------------------------------------

def _load(args):
    cfg = load_config(args.config)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "epochs", None) is not None:
        changes["epochs"] = args.epochs
    if changes:
        try:
            cfg = replace(cfg, **changes)
        except LabError as exc:
            raise ConfigInvalid(str(exc)) from exc
    return cfg


def _run_one(cfg, out_dir: Path, quiet: bool = False):
    """Train one config into ``out_dir``; returns (exit code, summary)."""
    try:
        result = train(cfg)
    except NumericalDivergence as exc:
        record = getattr(exc, "record", None)
        if record is not None:
            record.write(out_dir)
        if exc.checkpoint is not None:
            gen, disc = exc.checkpoint
            out_dir.mkdir(parents=True, exist_ok=True)
            save_checkpoint(gen, out_dir / "generator.json")
            save_checkpoint(disc, out_dir / "discriminator.json")
        if not quiet:
            print(f"numerical divergence: {exc}")
        return EXIT_DIVERGED, record.summary if record is not None else {"status": "diverged"}
    result.save(out_dir)
    return EXIT_OK, result.record.summary


def cmd_train(args) -> int:
    cfg = _load(args)
    out = Path(args.out_dir)
    print(f"training {cfg.name} ({cfg.loss_family}) seed={cfg.seed} epochs={cfg.epochs}")
    code, summary = _run_one(cfg, out)
    if code == EXIT_OK:
        print(f"min FID {fmt(summary['min_fid'])} at epoch {summary['min_fid_epoch']} "
              f"(row {summary['min_fid_epoch'] + 1} of runrecord.csv)")
        print(f"final FID {fmt(summary['final_fid'])}")
        if "modes_hit" in summary:
            print(f"modes hit {summary['modes_hit']}, high-quality fraction "
                  f"{fmt(summary['high_quality_fraction'])}")
        print(f"artifacts written to {out}")
    return code


def cmd_verify(args) -> int:
    try:
        results = run_suite(args.tolerance, args.only, args.pairs)
    except KeyError as exc:
        print(f"error: {exc.args[0]}; known checks: {', '.join(CHECK_NAMES)}")
        return EXIT_CONFIG
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  {'cases':>5}  {'max gap':>12}  result")
    for r in results:
        print(f"{r.name:<{width}}  {r.cases:>5}  {r.max_gap:>12.3e}  {'pass' if r.passed else 'FAIL'}")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks within tolerance {args.tolerance:g}")
    if args.csv:
        _write_csv(Path(args.csv), VERIFY_COLUMNS,
                   [[r.name, r.cases, repr(r.max_gap), repr(args.tolerance), int(r.passed)]
                    for r in results])
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_measure(args) -> int:
    fn, takes_order = MEASURES[args.measure]
    p, q = parse_dist(args.p), parse_dist(args.q)
    if takes_order:
        if args.order is None:
            raise SpecParseError(f"{args.measure} needs --order")
        value = fn(p, q, args.order)
    else:
        value = fn(p, q)
    print(fmt(value))
    return EXIT_OK


def cmd_fid(args) -> int:
    a, b = read_samples(args.samples_a), read_samples(args.samples_b)
    print(fmt(frechet_distance(fit_gaussian(a), fit_gaussian(b))))
    return EXIT_OK


def _jobs(requested: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    jobs = max(1, requested)
    if cap:
        try:
            jobs = min(jobs, max(1, int(cap)))
        except ValueError:
            raise ConfigInvalid(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return jobs


def cmd_sweep(args) -> int:
    base = _load(args)
    out = Path(args.out_dir)
    configs = [base.with_seed(s) for s in args.seeds]
    jobs = _jobs(args.jobs)
    print(f"sweeping {base.name} over {len(configs)} seeds with {jobs} worker(s)")

    def one(cfg):
        return _run_one(cfg, out / f"seed-{cfg.seed}", quiet=True)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(one, configs))
    rows = []
    for cfg, (code, s) in zip(configs, outcomes):
        rows.append([cfg.seed, s.get("status", ""), s.get("epochs_completed", "")]
                    + [repr(s[k]) if isinstance(s.get(k), float) else s.get(k, "")
                       for k in SWEEP_COLUMNS[3:]])
        print(f"seed {cfg.seed}: {s.get('status')}, min FID "
              f"{fmt(s['min_fid']) if 'min_fid' in s else 'n/a'}"
              + (f", modes hit {s['modes_hit']}" if "modes_hit" in s else ""))
    _write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    return EXIT_DIVERGED if any(code == EXIT_DIVERGED for code, _ in outcomes) else EXIT_OK


# parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renyigan-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def config_args(p):
        p.add_argument("config", help=f"YAML experiment file or preset name ({', '.join(PRESETS)})")
        p.add_argument("--epochs", type=int, help="override training.epochs")
        p.add_argument("--out-dir", default="runs/latest", help="artifact directory")

    p = sub.add_parser("train", help="train one configuration")
    config_args(p)
    p.add_argument("--seed", type=int, help="override training.seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("verify", help="run the identity and limit suite")
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--only", nargs="+", metavar="CHECK", help=f"subset of: {', '.join(CHECK_NAMES)}")
    p.add_argument("--pairs", type=int, default=4, help="random pairs per check")
    p.add_argument("--csv", help="also write the results table to this CSV file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("measure", help="evaluate a divergence or cross-entropy")
    p.add_argument("measure", choices=sorted(MEASURES))
    p.add_argument("p", help="N(mean,variance), [p1,...,pn] or histogram CSV (left,right,mass)")
    p.add_argument("q")
    p.add_argument("--order", type=float, help="alpha (Rényi measures) or k (Pearson-Vajda)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("fid", help="Fréchet distance between two CSV sample files")
    p.add_argument("samples_a")
    p.add_argument("samples_b")
    p.set_defaults(func=cmd_fid)

    p = sub.add_parser("sweep", help="train one configuration over several seeds")
    config_args(p)
    p.add_argument("--seeds", type=int, nargs="+", default=[123, 5005, 1600, 199621, 60677])
    p.add_argument("--jobs", type=int, default=1, help=f"worker threads (capped by {THREADS_ENV})")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage, which would read as a divergence
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigInvalid, SpecParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "build_parser", "parse_dist", "read_samples", "CHECKS"]
