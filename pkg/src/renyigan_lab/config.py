"""Training configuration, the experiment-file schema and the named presets."""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml

from .datasets import SyntheticDataset
from .errors import ConfigInvalid, LabError
from .losses import LkganParams, PenaltyConfig, RenyiganParams

SCHEMA_VERSION = 1
FAMILIES = ("lkgan", "renyigan", "dcgan-baseline")


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-7

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigInvalid("optimizer.learning_rate must be > 0")
        for name in ("beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ConfigInvalid(f"optimizer.{name} must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ConfigInvalid("optimizer.epsilon must be > 0")


@dataclass(frozen=True)
class TrainConfig:
    loss_family: str = "renyigan"
    lkgan: LkganParams | None = None
    renyigan: RenyiganParams | None = None
    baseline_l1: bool = False
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    epochs: int = 200
    batch_size: int = 64
    dataset: SyntheticDataset = field(default_factory=SyntheticDataset)
    latent_dim: int = 8
    optimizer: AdamConfig = field(default_factory=AdamConfig)
    seed: int = 123
    disc_steps_per_gen_step: int = 1
    hidden: int = 64
    depth: int = 3
    pool_size: int = 8192
    fid_samples: int = 2048
    divergence_threshold: float = 1e6
    name: str = "custom"

    def __post_init__(self):
        if self.loss_family not in FAMILIES:
            raise ConfigInvalid(f"loss_family must be one of {FAMILIES}, got {self.loss_family!r}")
        if self.loss_family == "lkgan" and self.lkgan is None:
            raise ConfigInvalid("loss_family lkgan needs lkgan parameters")
        if self.loss_family == "renyigan" and self.renyigan is None:
            raise ConfigInvalid("loss_family renyigan needs renyigan parameters")
        for name in ("epochs", "batch_size", "latent_dim", "disc_steps_per_gen_step", "hidden",
                     "depth", "pool_size"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigInvalid(f"{name} must be an integer >= 1, got {value!r}")
        if self.depth < 2:
            raise ConfigInvalid("depth must be >= 2")
        if self.batch_size > self.pool_size:
            raise ConfigInvalid("batch_size cannot exceed pool_size")
        if self.fid_samples < self.dataset.dimension + 1:
            raise ConfigInvalid("fid_samples too small for a covariance fit")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid("seed must be a 64-bit unsigned integer")
        if not self.divergence_threshold > 0:
            raise ConfigInvalid("divergence_threshold must be > 0")

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return config_to_document(self)


# experiment-file schema ------------------------------------------------------
#
# Each entry maps a key to its expected type; nested dicts are sections.

_NUM = (int, float)
SCHEMA = {
    "schema_version": int,
    "name": str,
    "loss_family": str,
    "lkgan": {"version": str, "k": _NUM, "a": _NUM, "b": _NUM, "c": _NUM},
    "renyigan": {"alpha": _NUM, "l1_normalized": bool, "alpha_schedule": (list, type(None))},
    "dcgan": {"l1_normalized": bool},
    "penalty": {"enabled": bool, "coefficient": _NUM},
    "training": {"epochs": int, "batch_size": int, "latent_dim": int, "seed": int,
                 "disc_steps_per_gen_step": int, "hidden": int, "depth": int, "pool_size": int,
                 "fid_samples": int, "divergence_threshold": _NUM},
    "optimizer": {"learning_rate": _NUM, "beta1": _NUM, "beta2": _NUM, "epsilon": _NUM},
    "dataset": {"kind": str, "n_modes": int, "radius": _NUM, "rows": int, "cols": int,
                "spacing": _NUM, "mode_std": _NUM, "mean": list, "cov": list},
}
REQUIRED = ("schema_version", "loss_family")


def _validate(doc, schema, path=""):
    if not isinstance(doc, dict):
        raise ConfigInvalid(f"{path or 'document'} must be a mapping")
    for key, value in doc.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in schema:
            raise ConfigInvalid(f"unknown key {where!r}")
        expected = schema[key]
        if isinstance(expected, dict):
            _validate(value, expected, where)
            continue
        if expected is _NUM and isinstance(value, str):
            # YAML 1.1 reads "2e-4" (no dot) as a string
            try:
                value = doc[key] = float(value)
            except ValueError:
                pass
        ok = isinstance(value, expected)
        if ok and isinstance(value, bool) and expected is not bool and bool not in (
                expected if isinstance(expected, tuple) else (expected,)):
            ok = False
        if not ok:
            raise ConfigInvalid(f"key {where!r} has the wrong type ({type(value).__name__})")


def validate_document(doc) -> None:
    _validate(doc, SCHEMA)
    for key in REQUIRED:
        if key not in doc:
            raise ConfigInvalid(f"missing required key {key!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ConfigInvalid(f"key 'schema_version' must be {SCHEMA_VERSION}")


def config_from_document(doc: dict) -> TrainConfig:
    """Validate an experiment document and build the TrainConfig it describes."""
    doc = copy.deepcopy(doc)
    validate_document(doc)
    try:
        return _build(doc)
    except ConfigInvalid:
        raise
    except (LabError, ValueError, TypeError) as exc:
        raise ConfigInvalid(str(exc)) from exc


def _build(doc: dict) -> TrainConfig:
    family = doc["loss_family"]
    lk = rg = None
    if "lkgan" in doc:
        sec = dict(doc["lkgan"])
        k = float(sec.pop("k", 2.0))
        if "version" in sec:
            if set(sec) - {"version"}:
                raise ConfigInvalid("key 'lkgan.version' cannot be combined with explicit a, b, c")
            lk = LkganParams.version(sec["version"], k)
        else:
            lk = LkganParams(k, **{n: float(v) for n, v in sec.items()})
    if "renyigan" in doc:
        sec = dict(doc["renyigan"])
        sched = sec.get("alpha_schedule")
        if sched is not None:
            if len(sched) != 2 or not all(isinstance(v, _NUM) for v in sched):
                raise ConfigInvalid("key 'renyigan.alpha_schedule' must be [beta1, beta2]")
            sched = (float(sched[0]), float(sched[1]))
        rg = RenyiganParams(float(sec.get("alpha", 3.0)), bool(sec.get("l1_normalized", False)), sched)
    pen = PenaltyConfig(**doc.get("penalty", {}))
    opt = AdamConfig(**{k: float(v) for k, v in doc.get("optimizer", {}).items()})
    ds_doc = dict(doc.get("dataset", {}))
    if "mean" in ds_doc:
        ds_doc["mean"] = tuple(float(v) for v in ds_doc["mean"])
    if "cov" in ds_doc:
        ds_doc["cov"] = tuple(tuple(float(v) for v in row) for row in ds_doc["cov"])
    dataset = SyntheticDataset(**ds_doc)
    training = dict(doc.get("training", {}))
    if "divergence_threshold" in training:
        training["divergence_threshold"] = float(training["divergence_threshold"])
    return TrainConfig(
        loss_family=family, lkgan=lk, renyigan=rg,
        baseline_l1=bool(doc.get("dcgan", {}).get("l1_normalized", False)),
        penalty=pen, dataset=dataset, optimizer=opt, name=doc.get("name", "custom"), **training)


def config_to_document(cfg: TrainConfig) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "name": cfg.name, "loss_family": cfg.loss_family}
    if cfg.lkgan is not None:
        doc["lkgan"] = {"k": cfg.lkgan.k, "a": cfg.lkgan.a, "b": cfg.lkgan.b, "c": cfg.lkgan.c}
    if cfg.renyigan is not None:
        sched = cfg.renyigan.alpha_schedule
        doc["renyigan"] = {"alpha": cfg.renyigan.alpha, "l1_normalized": cfg.renyigan.l1_normalized,
                           "alpha_schedule": None if sched is None else list(sched)}
    if cfg.loss_family == "dcgan-baseline":
        doc["dcgan"] = {"l1_normalized": cfg.baseline_l1}
    doc["penalty"] = asdict(cfg.penalty)
    doc["training"] = {n: getattr(cfg, n) for n in SCHEMA["training"]}
    doc["optimizer"] = asdict(cfg.optimizer)
    doc["dataset"] = cfg.dataset.to_dict()
    return doc


def load_config(path_or_preset: str | Path) -> TrainConfig:
    """Read a YAML experiment file, or return a named preset."""
    name = str(path_or_preset)
    if name in PRESETS and not Path(name).exists():
        return config_from_document(preset_document(name))
    try:
        text = Path(path_or_preset).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {name!r}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"malformed YAML in {name!r}: {exc}") from exc
    return config_from_document(doc)


# presets ---------------------------------------------------------------------

_COMMON = {
    "schema_version": SCHEMA_VERSION,
    "penalty": {"enabled": False, "coefficient": 5.0},
    "training": {"epochs": 200, "batch_size": 64, "latent_dim": 8, "seed": 123,
                 "disc_steps_per_gen_step": 1, "hidden": 64, "depth": 3, "pool_size": 8192,
                 "fid_samples": 2048, "divergence_threshold": 1e6},
    "optimizer": {"learning_rate": 2e-4, "beta1": 0.5, "beta2": 0.999, "epsilon": 1e-7},
    "dataset": {"kind": "ring", "n_modes": 8, "radius": 2.0, "mode_std": 0.05},
}

_SPECIFIC = {
    "lkgan-v1": {"loss_family": "lkgan", "lkgan": {"version": "v1", "k": 1.0}},
    "lkgan-v2": {"loss_family": "lkgan", "lkgan": {"version": "v2", "k": 2.0}},
    "lkgan-v3": {"loss_family": "lkgan", "lkgan": {"version": "v3", "k": 2.0}},
    "renyigan-alpha": {"loss_family": "renyigan",
                       "renyigan": {"alpha": 3.0, "l1_normalized": True, "alpha_schedule": None}},
    "renyigan-sweep": {"loss_family": "renyigan",
                       "renyigan": {"alpha": 3.0, "l1_normalized": True, "alpha_schedule": [0.0, 3.0]}},
    "dcgan-baseline": {"loss_family": "dcgan-baseline", "dcgan": {"l1_normalized": False}},
}

PRESETS = tuple(_SPECIFIC)


def preset_document(name: str) -> dict:
    if name not in _SPECIFIC:
        raise ConfigInvalid(f"unknown preset {name!r}; known presets: {', '.join(PRESETS)}")
    doc = {"schema_version": SCHEMA_VERSION, "name": name}
    doc.update(copy.deepcopy(_SPECIFIC[name]))
    doc.update(copy.deepcopy(_COMMON))
    return doc


def preset(name: str, **training) -> TrainConfig:
    """A preset config with optional overrides of training-section keys."""
    doc = preset_document(name)
    doc["training"].update(training)
    return config_from_document(doc)


def dump_document(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)
