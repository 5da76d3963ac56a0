"""Experiment configuration: presets, file loading, flag overrides."""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXPERIMENTS = ("blaschke1", "blaschke2", "sobolev_sweep", "normality_sweep",
               "kernel_blaschke", "trajectory_pipeline", "lemma_check")

_MU_PAPER_RE = 0.5303300858899107   # (3/4) e^{i pi/4}
_MU_PAPER_IM = 0.5303300858899106


@dataclass
class ExperimentConfig:
    experiment: str = "blaschke1"
    map: str = "blaschke1"
    mu_re: float | None = None
    mu_im: float | None = None
    n_pairs: int = 1000                 # M
    n_modes: int = 41                   # N
    space: str = "hardy-dual"
    s: float = 0.0
    radius_r: float = 0.75
    band: int | None = None
    literal_band: bool = False
    fourier_pi_scaling: bool = False
    kernel: str = "gaussian"
    c_sq: float | str = 0.01
    rank_r: int | str = "auto"
    grid_extent: float = 1.5
    grid_res: int = 101
    epsilon: float = 1e-2
    seed: int = 0
    stride: int = 1
    input: str | None = None
    n_clusters: int = 2
    sweep_s: list = field(default_factory=lambda: [2.0, 0.0, -1.0, -3.0, -6.0])
    save_gram: bool = False
    output_dir: str = "out"

    def mu(self) -> complex:
        if self.mu_re is None or self.mu_im is None:
            raise ConfigError("mu_re/mu_im: map parameter is required for this experiment")
        return complex(self.mu_re, self.mu_im)


_PRESETS: dict[str, dict] = {
    "blaschke1": {"map": "blaschke1", "mu_re": _MU_PAPER_RE, "mu_im": _MU_PAPER_IM,
                  "n_pairs": 1000, "n_modes": 41, "space": "hardy-dual", "radius_r": 0.75},
    # mu is deliberately not defaulted for the second map: no published value exists
    "blaschke2": {"map": "blaschke2", "n_pairs": 10000, "n_modes": 50,
                  "space": "hardy-dual", "radius_r": 0.755},
    "sobolev_sweep": {"map": "blaschke1", "mu_re": _MU_PAPER_RE, "mu_im": _MU_PAPER_IM,
                      "n_pairs": 1000, "n_modes": 41, "space": "sobolev"},
    "normality_sweep": {"map": "blaschke1", "mu_re": _MU_PAPER_RE, "mu_im": _MU_PAPER_IM,
                        "n_pairs": 4096, "n_modes": 41, "space": "sobolev"},
    "kernel_blaschke": {"map": "blaschke1", "mu_re": _MU_PAPER_RE, "mu_im": _MU_PAPER_IM,
                        "n_pairs": 1000, "c_sq": 0.01, "rank_r": 40},
    "trajectory_pipeline": {"c_sq": "auto-cov", "rank_r": 50, "n_clusters": 2},
    "lemma_check": {"map": "blaschke1", "mu_re": _MU_PAPER_RE, "mu_im": _MU_PAPER_IM,
                    "n_pairs": 2000, "n_modes": 21, "rank_r": 10},
}

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def preset_config(experiment: str) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown experiment {experiment!r}; "
                          f"choose one of {', '.join(EXPERIMENTS)}")
    cfg = ExperimentConfig(experiment=experiment)
    for key, val in _PRESETS.get(experiment, {}).items():
        setattr(cfg, key, val)
    return cfg


def load_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config: file not found: {path}")
    if path.suffix.lower() == ".json":
        raw = json.loads(path.read_text())
    else:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("config: top-level table/object expected")
    return raw


def build_config(experiment: str | None = None, file_values: dict | None = None,
                 overrides: dict | None = None) -> ExperimentConfig:
    """Merge preset < config file < explicit overrides, then validate."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    exp = overrides.get("experiment") or file_values.get("experiment") or experiment
    if exp is None:
        raise ConfigError("experiment: required (flag or config file)")
    cfg = preset_config(exp)
    for source in (file_values, overrides):
        for key, val in source.items():
            if key in ("versions", "artifacts"):
                continue  # meta.json round-trip carries these
            if key not in _FIELDS:
                raise ConfigError(f"{key}: unknown configuration field")
            setattr(cfg, key, val)
    cfg.experiment = exp
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    def fail(fieldname, msg):
        raise ConfigError(f"{fieldname}: {msg}")

    if cfg.experiment not in EXPERIMENTS:
        fail("experiment", f"unknown experiment {cfg.experiment!r}")
    if cfg.map not in ("blaschke1", "blaschke2"):
        fail("map", f"unknown map {cfg.map!r}")
    if cfg.n_pairs < 1:
        fail("n_pairs", "must be a positive integer")
    if cfg.n_modes < 1:
        fail("n_modes", "must be a positive integer")
    if cfg.space not in ("l2", "sobolev", "hardy-dual"):
        fail("space", f"unknown space {cfg.space!r}")
    if cfg.space == "hardy-dual" and not 0 < cfg.radius_r < 1:
        fail("radius_r", "must lie strictly between 0 and 1")
    if cfg.band is not None and cfg.band < 0:
        fail("band", "must be nonnegative")
    if cfg.kernel != "gaussian":
        fail("kernel", f"unknown kernel {cfg.kernel!r}")
    if isinstance(cfg.c_sq, str):
        if cfg.c_sq != "auto-cov":
            fail("c_sq", "must be a positive number or 'auto-cov'")
    elif cfg.c_sq <= 0:
        fail("c_sq", "must be positive")
    if isinstance(cfg.rank_r, str):
        if cfg.rank_r != "auto":
            fail("rank_r", "must be a positive integer or 'auto'")
    elif cfg.rank_r < 1:
        fail("rank_r", "must be at least 1")
    if cfg.grid_res < 2:
        fail("grid_res", "must be at least 2")
    if cfg.grid_extent <= 0:
        fail("grid_extent", "must be positive")
    if cfg.stride < 1:
        fail("stride", "must be at least 1")
    if cfg.n_clusters < 2:
        fail("n_clusters", "must be at least 2")
    if cfg.epsilon <= 0:
        fail("epsilon", "must be positive")

    mu_needed = cfg.experiment in ("blaschke1", "blaschke2", "sobolev_sweep",
                                   "normality_sweep", "kernel_blaschke", "lemma_check")
    if mu_needed:
        if cfg.mu_re is None or cfg.mu_im is None:
            fail("mu_re", "map parameter mu is required for this experiment")
        mu = abs(cfg.mu())
        if cfg.map == "blaschke1" and mu >= 1:
            fail("mu_re", f"|mu| = {mu:.4f} must be < 1 for the product map")
        if cfg.map == "blaschke2" and mu >= 1 / 3:
            fail("mu_re", f"|mu| = {mu:.4f} must be < 1/3 for the squared map")
    if cfg.experiment == "trajectory_pipeline" and not cfg.input:
        fail("input", "trajectory_pipeline needs an input CSV")


def resolved_dict(cfg: ExperimentConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["sweep_s"] = [float(s) for s in cfg.sweep_s]
    out["input"] = None if cfg.input is None else str(cfg.input)
    out["output_dir"] = str(cfg.output_dir)
    return out
