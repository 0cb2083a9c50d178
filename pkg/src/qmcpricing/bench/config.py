"""Experiment configurations, loadable from JSON; omitted fields take the study defaults."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

BASKET_METHODS = ("mc", "sobol", "faure", "rqmc-sobol")
ASIAN_METHODS = ("mc", "rqmc-sobol", "halton")


class ConfigError(ValueError):
    """Raised with every validation problem found, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


def _powers(base, lo, hi):
    return tuple(base ** k for k in range(lo, hi + 1))


@dataclass(frozen=True)
class BasketExperimentConfig:
    spot: float = 100.0
    rate: float = 0.05
    maturities: tuple[float, ...] = (0.15, 0.25, 0.5, 1.0, 2.0)
    vols: tuple[float, ...] = tuple(round(0.21 + 0.05 * k, 2) for k in range(10))
    strikes: tuple[float, ...] = tuple(float(k) for k in range(94, 104))
    assets: int = 5
    methods: tuple[str, ...] = BASKET_METHODS
    sobol_grid: tuple[int, ...] = _powers(2, 8, 16)
    faure_grid: tuple[int, ...] = _powers(5, 3, 6)
    rqmc_grid: tuple[int, ...] = _powers(2, 8, 16)
    mc_grid: tuple[int, ...] = _powers(2, 8, 16)
    mc_ref_n: int = 2 ** 16
    mc_replications: int = 100
    rqmc_replications: int = 10
    sobol_skip: int = 256
    faure_skip: int | None = None  # None: b**4
    master_seed: int = 2025
    # dimension sweep
    dim_grid: tuple[int, ...] = (5, 10, 20, 40, 70, 100)
    sweep_sobol_n: int = 2 ** 12
    sweep_faure_n: int = 5 ** 5
    sweep_mc_n: int = 2 ** 12
    sweep_mc_replications: int = 30

    def validate(self) -> None:
        errors = []
        for name in ("maturities", "vols", "strikes"):
            vals = getattr(self, name)
            if not vals:
                errors.append(f"{name}: must not be empty")
            elif any(v <= 0 for v in vals):
                errors.append(f"{name}: all values must be positive")
        if self.spot <= 0:
            errors.append("spot: must be positive")
        if self.rate <= 0:
            errors.append("rate: must be positive")
        if not 1 <= self.assets <= 512:
            errors.append("assets: must be in [1, 512]")
        for m in self.methods:
            if m not in BASKET_METHODS:
                errors.append(f"methods: unknown method {m!r} (choose from {', '.join(BASKET_METHODS)})")
        for name in ("sobol_grid", "rqmc_grid", "mc_grid", "faure_grid", "dim_grid"):
            vals = getattr(self, name)
            if not vals or any(int(v) < 1 for v in vals):
                errors.append(f"{name}: must be a non-empty list of positive integers")
        for name in ("mc_ref_n", "sweep_sobol_n", "sweep_faure_n", "sweep_mc_n", "rqmc_replications"):
            if getattr(self, name) < 1:
                errors.append(f"{name}: must be >= 1")
        if "mc" in self.methods and self.mc_replications < 30:
            errors.append("mc_replications: the MC reference RMSE needs at least 30 replications")
        if self.sweep_mc_replications < 2:
            errors.append("sweep_mc_replications: must be >= 2")
        if self.sobol_skip < 0 or (self.faure_skip is not None and self.faure_skip < 0):
            errors.append("skips must be non-negative")
        if errors:
            raise ConfigError(errors)

    @property
    def option_count(self) -> int:
        return len(self.maturities) * len(self.vols) * len(self.strikes)


@dataclass(frozen=True)
class AsianExperimentConfig:
    spot: float = 100.0
    rate: float = 0.05
    maturity: float = 1.0
    steps: int = 120  # 3-day step on a 360-day year
    vols: tuple[float, ...] = (0.15, 0.20, 0.25)
    strikes: tuple[float, ...] = (90.0, 100.0, 110.0)
    methods: tuple[str, ...] = ("mc", "rqmc-sobol")
    n_grid: tuple[int, ...] = _powers(2, 8, 14)
    repetitions: int = 10
    reference_paths: int = 2 ** 20
    reference_randomizations: int = 8
    sobol_skip: int = 256
    halton_skip: int = 0
    master_seed: int = 2025

    def validate(self) -> None:
        errors = []
        if self.spot <= 0 or self.rate <= 0 or self.maturity <= 0:
            errors.append("spot, rate and maturity must be positive")
        if self.steps < 1:
            errors.append("steps: must be >= 1")
        if not self.vols or any(v <= 0 for v in self.vols):
            errors.append("vols: must be a non-empty list of positive values")
        if not self.strikes or any(k <= 0 for k in self.strikes):
            errors.append("strikes: must be a non-empty list of positive values")
        for m in self.methods:
            if m not in ASIAN_METHODS:
                errors.append(f"methods: unknown method {m!r} (choose from {', '.join(ASIAN_METHODS)})")
        if not self.n_grid or any(int(n) < 1 for n in self.n_grid):
            errors.append("n_grid: must be a non-empty list of positive integers")
        if self.repetitions < 1:
            errors.append("repetitions: must be >= 1")
        if self.reference_paths < 1 or self.reference_randomizations < 1:
            errors.append("reference_paths and reference_randomizations must be >= 1")
        if self.sobol_skip < 0 or self.halton_skip < 0:
            errors.append("skips must be non-negative")
        if errors:
            raise ConfigError(errors)

    @property
    def combinations(self) -> int:
        return len(self.vols) * len(self.strikes)


def _coerce(cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError([f"expected a JSON object, got {type(data).__name__}"])
    fields = {f.name: f for f in dataclasses.fields(cls)}
    errors = [f"{key}: unknown field" for key in data if key not in fields]
    kwargs = {}
    for key, value in data.items():
        if key not in fields:
            continue
        default = getattr(cls, key) if hasattr(cls, key) else None
        try:
            if isinstance(default, tuple):
                if not isinstance(value, list):
                    raise TypeError("expected a list")
                kind = type(default[0]) if default else float
                kwargs[key] = tuple(kind(v) if kind is not str else str(v) for v in value)
            elif key == "faure_skip":
                kwargs[key] = None if value is None else int(value)
            elif isinstance(default, bool) or isinstance(value, bool):
                raise TypeError("booleans are not accepted")
            elif isinstance(default, int):
                if isinstance(value, float) and not value.is_integer():
                    raise TypeError("expected an integer")
                kwargs[key] = int(value)
            elif isinstance(default, float):
                kwargs[key] = float(value)
            else:
                kwargs[key] = value
        except (TypeError, ValueError) as exc:
            errors.append(f"{key}: {exc}")
    if errors:
        raise ConfigError(errors)
    config = cls(**kwargs)
    config.validate()
    return config


def basket_config_from_dict(data: dict) -> BasketExperimentConfig:
    return _coerce(BasketExperimentConfig, data)


def asian_config_from_dict(data: dict) -> AsianExperimentConfig:
    return _coerce(AsianExperimentConfig, data)


def load_config(path: str | Path, kind: str):
    """Read a JSON config file; ``kind`` is 'basket', 'dimsweep' or 'asian'."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: invalid JSON ({exc})"]) from None
    if kind == "asian":
        return asian_config_from_dict(data)
    return basket_config_from_dict(data)


def config_hash(config) -> str:
    blob = json.dumps(dataclasses.asdict(config), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
