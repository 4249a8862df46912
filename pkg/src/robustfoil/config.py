"""Flat campaign configuration shared by the optimizer loop, the harness and the CLI."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

MODES = ("dsp", "average", "robust")
ALGORITHMS = ("adagrad", "sgd")
DEFAULT_NORMALIZED_COST = 2000
WORKERS_ENV = "ROBUSTFOIL_WORKERS"

# JSON keys that differ from attribute names.
_KEY_ALIASES = {"lambda": "lam"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    mode: str = "robust"
    n: int = 4
    lam: float = 0.0
    eta: float = 0.02
    iterations: int | None = None
    seed: int = 0
    algorithm: str = "adagrad"
    epsilon: float = 1.0e-8

    kappa: tuple[float, float, float] = (1.0, 1.0, 1.0)
    c_l_star: float = 0.375
    vol_tol: float = 1.0e-3

    dy_max: float = 0.05
    alpha_min: float = -5.0
    alpha_max: float = 10.0
    alpha0: float = 0.0

    re_min: float = 1.0e6
    re_max: float = 1.0e7
    log_uniform_re: bool = False

    n_per_surface: int = 200
    nx: int = 10
    ny: int = 2
    margin_x: float = 0.0
    margin_y: float = 0.02
    n_quad: int = 64
    lift_slope_factors: tuple[float, ...] | None = None
    lift_drag_factors: tuple[float, ...] | None = None

    study_samples: int = 100
    study_seed: int = 12345
    out: str = "results"

    def __post_init__(self):
        for name in ("kappa", "lift_slope_factors", "lift_drag_factors"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(v) for v in value))

    @property
    def n_iterations(self) -> int:
        if self.iterations is not None:
            return int(self.iterations)
        return max(1, DEFAULT_NORMALIZED_COST // self.n)

    def normalized(self) -> "CampaignConfig":
        """Validate and apply the mode rules (DSP: n=1, lambda=0; average: lambda=0)."""
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        cfg = self
        if cfg.mode == "dsp" and (cfg.n != 1 or cfg.lam != 0):
            log.info("dsp mode: using n=1 and lambda=0")
            cfg = dataclasses.replace(cfg, n=1, lam=0.0)
        if cfg.mode == "average" and cfg.lam != 0:
            log.info("average mode: using lambda=0")
            cfg = dataclasses.replace(cfg, lam=0.0)
        checks = [
            (cfg.n >= 1, "n must be >= 1"),
            (cfg.lam >= 0, "lambda must be >= 0"),
            (cfg.eta > 0, "eta must be > 0"),
            (cfg.epsilon > 0, "epsilon must be > 0"),
            (cfg.iterations is None or cfg.iterations >= 1, "iterations must be >= 1"),
            (cfg.study_samples >= 2, "study_samples must be >= 2"),
            (cfg.dy_max > 0, "dy_max must be > 0"),
            (cfg.alpha_min <= cfg.alpha0 <= cfg.alpha_max, "alpha0 must lie in [alpha_min, alpha_max]"),
            (1.0e6 <= cfg.re_min < cfg.re_max <= 1.0e7, "Reynolds bounds must lie in [1e6, 1e7]"),
            (len(cfg.kappa) == 3 and min(cfg.kappa) >= 0, "kappa needs 3 non-negative weights"),
            (cfg.c_l_star > 0, "c_l_star must be > 0"),
            (cfg.vol_tol >= 0, "vol_tol must be >= 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return cfg

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lam")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            attr = _KEY_ALIASES.get(key, key)
            if attr not in names:
                raise ConfigError(f"unknown configuration key {key!r}")
            kwargs[attr] = value
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path=None, **overrides) -> CampaignConfig:
    """Read a JSON config file (optional) and apply non-None overrides on top."""
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return CampaignConfig.from_dict(data).normalized()


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
