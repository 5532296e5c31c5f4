"""Experiment configuration: a flat ``key = value`` file overlaid by command-line flags."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from pathcalc.core.common.exceptions import ConfigError
from pathcalc.core.common.validation import ValidationError, validate_power_of_two

EXPERIMENTS = ("qv", "integrate", "bdg", "outer", "sde", "duality", "selftest")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def parse_grid(raw: str | int) -> int:
    """Number of grid steps, given as ``4096`` or ``2^12``.

    Raises:
        ConfigError: If the value is not a positive power of two.
    """
    text = str(raw).strip()
    try:
        if "^" in text:
            base, exponent = text.split("^", 1)
            if base.strip() != "2":
                raise ValueError(text)
            steps = 2 ** int(exponent)
        else:
            steps = int(text)
        validate_power_of_two(steps, "grid")
    except (ValueError, ValidationError) as e:
        raise ConfigError("grid", f"{text!r} is not a power of two") from e
    return steps


def parse_schedule(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(raw).split(",") if part.strip())
    except ValueError as e:
        raise ConfigError("schedule", f"{raw!r} is not a comma separated list of integers") from e


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment configuration.

    Attributes:
        experiment: One of qv, integrate, bdg, outer, sde, duality, selftest
        seed: Root seed of every sampled ensemble
        grid: Number of grid steps (a power of two)
        c: Slope bound of the prediction set
        T: Horizon
        paths: Ensemble size
        tol: Tolerance override (QV search, superhedge margin or Picard)
        measure: Sampler law tag; defaults to ``bm`` with volatility sqrt(c)
    """

    experiment: str
    seed: int | None = None
    grid: int = 4096
    c: float = 1.0
    T: float = 1.0
    paths: int = 100
    tol: float | None = None
    measure: str | None = None
    payoff: str = "sup_integral_sq"
    out: str | None = None
    report: str | None = None
    n_jobs: int = 1
    m_max: int = 20
    mode: str = "h2"
    schedule: tuple[int, ...] | None = None
    integrand: str | None = None
    spec: str | None = None
    path: str | None = None
    nmax: int = 30
    offset: float = 0.0
    level: int = 4
    metrics_out: str | None = None
    log_level: str = "INFO"

    def __post_init__(self) -> None:
        """Validate configuration."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        if self.seed is None and self.experiment != "selftest":
            raise ConfigError("seed", "a seed is required")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        parse_grid(self.grid)
        for key in ("c", "T"):
            if not getattr(self, key) > 0:
                raise ConfigError(key, "must be positive")
        if self.paths < 1:
            raise ConfigError("paths", "must be positive")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol", "must be positive")
        if self.mode not in ("h2", "hinf"):
            raise ConfigError("mode", "must be h2 or hinf")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs", "must be nonzero")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError("log_level", f"must be one of {', '.join(LOG_LEVELS)}")

    @property
    def law(self) -> str:
        return self.measure or f"bm({math.sqrt(self.c):.17g})"

    def echo(self) -> dict[str, Any]:
        """Every setting, for the reproducibility section of a report."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values["schedule"] = list(self.schedule) if self.schedule is not None else None
        values["measure"] = self.law
        return values


_CONVERTERS: dict[str, Any] = {
    "seed": int,
    "grid": parse_grid,
    "c": float,
    "T": float,
    "paths": int,
    "tol": float,
    "n_jobs": int,
    "m_max": int,
    "schedule": parse_schedule,
    "nmax": int,
    "offset": float,
    "level": int,
    "log_level": str.upper,
}
KEYS = frozenset(f.name for f in fields(ExperimentConfig))


def read_config_file(source: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped.

    Raises:
        ConfigError: For missing files, malformed lines or unknown keys.
    """
    location = Path(source)
    if not location.is_file():
        raise ConfigError("config", f"no such file: {location}")
    values: dict[str, str] = {}
    for number, line in enumerate(location.read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError("config", f"line {number} is not 'key = value'")
        if key not in KEYS:
            raise ConfigError(key, f"unknown key on line {number}")
        values[key] = value.strip()
    return values


def build_config(
    file_values: Mapping[str, Any] | None = None, flags: Mapping[str, Any] | None = None
) -> ExperimentConfig:
    """Merge file values and flags (flags win, ``None`` flags are ignored) and validate."""
    merged: dict[str, Any] = dict(file_values or {})
    merged.update({key: value for key, value in (flags or {}).items() if value is not None})
    unknown = set(merged) - KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    if "experiment" not in merged:
        raise ConfigError("experiment", "no experiment named")
    typed: dict[str, Any] = {}
    for key, value in merged.items():
        convert = _CONVERTERS.get(key)
        if convert is None or not isinstance(value, str):
            typed[key] = value
            continue
        try:
            typed[key] = convert(value)
        except ValueError as e:
            raise ConfigError(key, f"cannot parse {value!r}") from e
    return ExperimentConfig(**typed)
