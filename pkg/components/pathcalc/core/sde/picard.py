"""Picard iteration for pathwise SDEs with a priori factorial envelopes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.special import gammaln

from pathcalc.core.common.exceptions import DimensionMismatchError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import get_observability
from pathcalc.core.common.statistics import mean_estimate
from pathcalc.core.common.validation import validate_non_negative, validate_positive
from pathcalc.core.execution import PoolSettings, map_paths
from pathcalc.core.integration import SimpleIntegrand, integrate_fv, integrate_simple
from pathcalc.core.paths import PathSet, QvPath, SamplePath, require_same_grid

from .spec import PicardSettings, PicardState, SdeSpec

logger = StructuredLogger(__name__)


def picard_constant(c: float, T: float, L: float) -> float:  # noqa: N803
    """Contraction constant ``(2 c^2 T + 8 c) L^2``."""
    validate_positive(c, "c")
    validate_positive(T, "T")
    validate_non_negative(L, "L")
    return (2.0 * c * c * T + 8.0 * c) * L * L


def picard_bound(n: int, t: float, g0: float, C: float) -> float:  # noqa: N803
    """Envelope ``g0 (C t)^n / n!`` of the n-th sup-square gap."""
    validate_non_negative(n, "n")
    validate_non_negative(t, "t")
    if n == 0:
        return g0
    rate = C * t
    if rate == 0.0 or g0 == 0.0:
        return 0.0
    if n <= 170:
        return g0 * rate**n / math.factorial(n)
    return g0 * math.exp(n * math.log(rate) - float(gammaln(n + 1)))


def picard_step(
    spec: SdeSpec, X: SamplePath, path: SamplePath, qv: QvPath | None = None  # noqa: N803
) -> SamplePath:
    """``x0 + (mu(., X) . A) + (sigma(., X) . S)`` with left-point coefficients.

    The coefficients are frozen on every grid cell, i.e. the integrands are the
    grid-resolution simple approximations of ``mu(t, X_t)`` and ``sigma(t, X_t)``.
    """
    require_same_grid(X.times, path.times, "iterate", "path")
    require_same_grid(spec.A.times, path.times, "driver", "path")
    if X.dim != spec.d_K:
        raise DimensionMismatchError("iterate", spec.d_K, X.dim)
    if path.dim != spec.d_H:
        raise DimensionMismatchError("path", spec.d_H, path.dim)
    every_step = np.arange(len(path))
    drift = SimpleIntegrand(
        path.times, every_step, spec.drift_on(path.times, X.values)[:-1, :, None]
    )
    diffusion = SimpleIntegrand(
        path.times, every_step, spec.diffusion_on(path.times, X.values)[:-1]
    )
    values = (
        spec.x0
        + integrate_fv(drift, spec.A).values
        + integrate_simple(diffusion, path).values
    )
    return SamplePath(path.times, values)


def _sup_square_gap(left: SamplePath, right: SamplePath) -> float:
    diff = left.values - right.values
    return float(np.max(np.sum(diff * diff, axis=1)))


def _sweep(
    index: int, *, spec: SdeSpec, paths: PathSet, X: list[SamplePath]  # noqa: N803
) -> SamplePath:
    return picard_step(spec, X[index], paths[index])


@dataclass(frozen=True)
class PicardReport:
    """Convergence record of a Picard run over an ensemble."""

    converged: bool
    iterations: int
    g: tuple[float, ...]
    envelope: tuple[float, ...]
    g0: float
    C: float
    tol: float
    uniqueness_distance: float | None = None

    @property
    def unique(self) -> bool | None:
        if self.uniqueness_distance is None:
            return None
        return self.uniqueness_distance < 10.0 * self.tol

    @property
    def ratios(self) -> tuple[float, ...]:
        """``g^n / g^{n-1}`` where defined."""
        return tuple(b / a for a, b in zip(self.g, self.g[1:]) if a > 0)

    def to_dict(self) -> dict[str, object]:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "g": list(self.g),
            "envelope": list(self.envelope),
            "g0": self.g0,
            "C": self.C,
            "tol": self.tol,
            "uniqueness_distance": self.uniqueness_distance,
            "unique": self.unique,
        }


def iterate_picard(
    spec: SdeSpec,
    paths: PathSet,
    start: SamplePath | None = None,
    *,
    settings: PicardSettings | None = None,
    pool: PoolSettings | None = None,
) -> PicardState:
    """Run Picard sweeps over ``paths`` from the constant iterate ``start`` (default x0).

    Stops once the ensemble mean of ``sup_t ||X^{n+1} - X^n||^2`` drops below ``tol^2``
    or after ``n_max`` sweeps.
    """
    settings = settings or PicardSettings()
    hooks = get_observability()
    initial = start if start is not None else SamplePath.constant(spec.A.times, spec.x0)
    X = [initial] * len(paths)  # noqa: N806
    gaps: list[float] = []
    for n in range(1, settings.n_max + 1):
        following = map_paths(partial(_sweep, spec=spec, paths=paths, X=X), range(len(paths)), pool)
        g = mean_estimate([_sup_square_gap(a, b) for a, b in zip(following, X)]).mean
        gaps.append(g)
        X = following  # noqa: N806
        hooks.record_picard_iteration(n, g)
        logger.debug("Picard sweep", n=n, g=g)
        if g < settings.tol**2:
            break
    return PicardState(len(gaps), tuple(X), tuple(gaps))


def solve_sde(
    spec: SdeSpec,
    paths: PathSet,
    qvs: object = None,
    tol: float | None = None,
    n_max: int | None = None,
    *,
    settings: PicardSettings | None = None,
    pool: PoolSettings | None = None,
) -> tuple[list[SamplePath], PicardReport]:
    """Solve the SDE on every path by Picard iteration.

    The report carries the empirical gaps, the envelope ``picard_bound(n, T, g0, C)``
    and, unless disabled, the mean sup distance to a second run started from
    ``x0 + perturbation``. ``qvs`` is accepted for interface symmetry; the left-point
    scheme needs no quadratic variation.
    """
    settings = settings or PicardSettings()
    if tol is not None or n_max is not None:
        settings = PicardSettings(
            tol=tol if tol is not None else settings.tol,
            n_max=n_max if n_max is not None else settings.n_max,
            perturbation=settings.perturbation,
            check_uniqueness=settings.check_uniqueness,
        )
    with get_observability().span("solve_sde", paths=len(paths), spec=spec.name):
        state = iterate_picard(spec, paths, settings=settings, pool=pool)
        converged = bool(state.g) and state.g[-1] < settings.tol**2
        distance = None
        if settings.check_uniqueness:
            shifted = SamplePath.constant(spec.A.times, spec.x0 + settings.perturbation)
            other = iterate_picard(spec, paths, shifted, settings=settings, pool=pool)
            distance = mean_estimate(
                [math.sqrt(_sup_square_gap(a, b)) for a, b in zip(state.X, other.X)]
            ).mean
    C = picard_constant(spec.c, spec.T, spec.L)  # noqa: N806
    g0 = spec.initial_scale()
    report = PicardReport(
        converged=converged,
        iterations=state.n,
        g=state.g,
        envelope=tuple(picard_bound(n, spec.T, g0, C) for n in range(1, state.n + 1)),
        g0=g0,
        C=C,
        tol=settings.tol,
        uniqueness_distance=distance,
    )
    if not converged:
        logger.warning("Picard iteration did not converge", n_max=settings.n_max, g=state.g[-1])
        get_observability().record_violation("picard", f"no convergence in {settings.n_max}")
    if report.unique is False:
        get_observability().record_violation("uniqueness", f"distance {distance:.6g}")
    logger.info("SDE solved", iterations=state.n, converged=converged, unique=report.unique)
    return list(state.X), report
