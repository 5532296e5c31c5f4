"""Seeded generators of martingale path ensembles."""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import MeasureTagError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import (
    ValidationError,
    validate_non_negative,
    validate_one_of,
    validate_positive,
)

from .model import FloatArray, PathEnsemble, PredictionSetSpec, SamplerLaw, SamplePath, same_grid

logger = StructuredLogger(__name__)


def uniform_grid(T: float, n_steps: int) -> FloatArray:  # noqa: N803
    """``n_steps + 1`` equally spaced times on [0, T]."""
    validate_positive(T, "T")
    validate_positive(n_steps, "n_steps")
    return np.linspace(0.0, T, n_steps + 1)


def path_rng(seed: int | None, index: int) -> np.random.Generator:
    """Random stream of path ``index``, independent of how paths are scheduled."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _gaussian_path(
    variances: FloatArray, dim: int, seed: int | None, index: int, offset: float
) -> FloatArray:
    rng = path_rng(seed, index)
    steps = rng.standard_normal((variances.size, dim)) * np.sqrt(variances)[:, None]
    values = np.empty((variances.size + 1, dim))
    values[0] = offset
    np.cumsum(steps, axis=0, out=values[1:])
    values[1:] += offset
    return values


@dataclass(frozen=True)
class BrownianLaw:
    """Brownian motion with independent coordinates of volatility ``vol``."""

    vol: float

    def __post_init__(self) -> None:
        validate_non_negative(self.vol, "vol")

    @property
    def tag(self) -> str:
        return f"bm({self.vol:g})"

    def generate(
        self, times: FloatArray, dim: int, seed: int | None, index: int, offset: float
    ) -> FloatArray:
        return _gaussian_path(self.vol**2 * np.diff(times), dim, seed, index, offset)

    def max_rate(self) -> float:
        return self.vol**2


def _const_clock(t: FloatArray, T: float) -> FloatArray:  # noqa: N803
    return np.asarray(t, dtype=np.float64)


def _ramp_clock(t: FloatArray, T: float) -> FloatArray:  # noqa: N803
    return np.asarray(t) ** 2 / (2.0 * T)


def _sine_clock(t: FloatArray, T: float) -> FloatArray:  # noqa: N803
    t = np.asarray(t, dtype=np.float64)
    return 0.5 * (t - T / (2.0 * math.pi) * (np.cos(2.0 * math.pi * t / T) - 1.0))


# Antiderivatives of rate shapes with values in [0, 1].
RATE_CLOCKS: dict[str, Callable[[FloatArray, float], FloatArray]] = {
    "const": _const_clock,
    "ramp": _ramp_clock,
    "sine": _sine_clock,
}


@dataclass(frozen=True)
class TimeChangedBrownianLaw:
    """Brownian motion run on the clock ``c * shape``; its QV slope never exceeds ``c``."""

    shape: str
    c: float

    def __post_init__(self) -> None:
        validate_one_of(self.shape, tuple(RATE_CLOCKS), "shape")
        validate_non_negative(self.c, "c")

    @property
    def tag(self) -> str:
        return f"time_changed_bm({self.shape},{self.c:g})"

    def generate(
        self, times: FloatArray, dim: int, seed: int | None, index: int, offset: float
    ) -> FloatArray:
        clock = RATE_CLOCKS[self.shape](times, float(times[-1]))
        variances = np.maximum(self.c * np.diff(clock), 0.0)
        return _gaussian_path(variances, dim, seed, index, offset)

    def max_rate(self) -> float:
        return self.c


@dataclass(frozen=True, eq=False)
class DeterministicLaw:
    """A fixed list of paths; ``seed`` and ``offset`` are ignored."""

    paths: tuple[SamplePath, ...]

    def __post_init__(self) -> None:
        if not self.paths:
            raise ValidationError("at least one path is required", field="paths")
        first = self.paths[0]
        for path in self.paths[1:]:
            if not same_grid(first.times, path.times) or path.dim != first.dim:
                raise ValidationError("paths must share grid and dimension", field="paths")

    @property
    def tag(self) -> str:
        return "deterministic"

    def generate(
        self, times: FloatArray, dim: int, seed: int | None, index: int, offset: float
    ) -> FloatArray:
        return self.paths[index].values

    def max_rate(self) -> None:
        return None


_CALL_FORM = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def parse_measure_tag(tag: str) -> SamplerLaw:
    """Parse ``bm(0.5)``, ``bm:0.5``, ``time_changed_bm(ramp,1.0)`` or ``tcbm:ramp:1.0``."""
    match = _CALL_FORM.match(tag)
    if match:
        name, args = match.group(1), [a.strip() for a in match.group(2).split(",") if a.strip()]
    else:
        name, *args = [part.strip() for part in tag.strip().split(":")]
    try:
        if name == "bm" and len(args) == 1:
            return BrownianLaw(float(args[0]))
        if name in ("time_changed_bm", "tcbm") and len(args) == 2:
            return TimeChangedBrownianLaw(args[0], float(args[1]))
    except (ValueError, ValidationError) as exc:
        raise MeasureTagError(tag, str(exc)) from exc
    if name == "deterministic":
        raise MeasureTagError(tag, "deterministic ensembles are built from explicit paths")
    raise MeasureTagError(tag, "unknown law")


def sample_ensemble(
    law: SamplerLaw | str,
    grid: ArrayLike,
    n_paths: int,
    seed: int | None,
    *,
    dim: int = 1,
    offset: float = 0.0,
    spec: PredictionSetSpec | None = None,
) -> PathEnsemble:
    """A reproducible ensemble of ``n_paths`` paths of ``law`` on ``grid``.

    Path ``i`` draws from ``SeedSequence(seed, spawn_key=(i,))`` so identical arguments
    give bit-identical paths regardless of access order.

    Raises:
        MeasureTagError: If the tag is unknown, or the law's rate exceeds ``spec.c``.
    """
    if isinstance(law, str):
        law = parse_measure_tag(law)
    validate_positive(n_paths, "n_paths")
    times = np.asarray(grid, dtype=np.float64)
    rate = law.max_rate()
    if spec is not None and rate is not None and rate > spec.c:
        raise MeasureTagError(law.tag, f"QV rate {rate:g} exceeds bound c={spec.c:g}")
    if isinstance(law, DeterministicLaw):
        first = law.paths[0]
        if not same_grid(first.times, times):
            raise ValidationError("deterministic paths are not on the requested grid", "grid")
        n_paths = len(law.paths)
        dim = first.dim
    logger.debug("Ensemble defined", law=law.tag, paths=n_paths, seed=seed, points=times.size)
    return PathEnsemble(times, n_paths, law, seed, dim, offset)


def deterministic_ensemble(paths: Sequence[SamplePath]) -> PathEnsemble:
    """Ensemble made of explicit paths."""
    law = DeterministicLaw(tuple(paths))
    return sample_ensemble(law, law.paths[0].times, len(law.paths), None)
