"""Grid versions of the integrand norms used by the BDG inequalities."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import GridMismatchError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import ValidationError
from pathcalc.core.integration import (
    DifferenceIntegrand,
    IntegrandSource,
    OperatorPathFunctional,
    grid_index_at_or_after,
    integrate_stieltjes,
    operator_norms,
    resolve_integrand,
)
from pathcalc.core.paths import PathSet, QvSource, SamplePath, qv_of, same_grid

logger = StructuredLogger(__name__)

Integrand = OperatorPathFunctional | IntegrandSource


def norms_squared_on_grid(F: Integrand, path: SamplePath) -> np.ndarray:  # noqa: N803
    """``||F_t||^2`` at every grid time, using the coefficient active just after t."""
    if isinstance(F, OperatorPathFunctional):
        return F.norms_squared_on_grid(path)
    resolved = resolve_integrand(F, path)
    norms = operator_norms(resolved.step_coefficients())
    return np.append(norms * norms, 0.0)


@dataclass(frozen=True)
class NormEstimate:
    """Monte Carlo estimate of a norm, with the sampler chosen at each time."""

    value: float
    standard_error: float
    samples: int
    selected: tuple[int, ...] = ()


def norm_h_inf(F: Integrand, paths: PathSet, qvs: QvSource = None) -> float:  # noqa: N803
    """``max_paths (||F||^2 . <S>)_T^(1/2)`` with left-point Stieltjes sums."""
    best = 0.0
    for index, path in enumerate(paths):
        qv = qv_of(path, qvs, index)
        weights = SamplePath(path.times, norms_squared_on_grid(F, path))
        best = max(best, float(integrate_stieltjes(weights, qv).values[-1, 0]))
    return math.sqrt(best)


def _evaluation_indices(
    times: np.ndarray, t_grid: ArrayLike | None
) -> tuple[np.ndarray, np.ndarray]:
    if t_grid is None:
        return np.arange(times.size - 1), np.diff(times)
    points = np.asarray(t_grid, dtype=np.float64)
    if points.size < 2 or np.any(np.diff(points) <= 0):
        raise ValidationError("t_grid must be increasing with at least two points", "t_grid")
    indices = np.array([grid_index_at_or_after(times, float(t)) for t in points[:-1]])
    return indices, np.diff(points)


def norm_h2(
    F: Integrand,  # noqa: N803
    samplers: Sequence[PathSet],
    t_grid: ArrayLike | None = None,
) -> NormEstimate:
    """``(sum_i dt_i max_samplers mean ||F_{t_i}||^2)^(1/2)`` with a delta-method SE.

    The maximum over finitely many measures underestimates the supremum over all
    martingale measures, so the estimate is biased low.
    """
    if not samplers:
        raise ValidationError("at least one sampler is required", "samplers")
    times = samplers[0][0].times
    indices, weights = _evaluation_indices(times, t_grid)

    means = []
    for sampler in samplers:
        total = np.zeros(indices.size)
        for path in sampler:
            if not same_grid(path.times, times):
                raise GridMismatchError("sampler", "sampler")
            total += norms_squared_on_grid(F, path)[indices]
        means.append(total / len(sampler))
    table = np.stack(means)
    choice = np.argmax(table, axis=0)
    variance_sum = float(np.sum(weights * table[choice, np.arange(indices.size)]))
    value = math.sqrt(max(variance_sum, 0.0))

    variance = 0.0
    samples = 0
    for s, sampler in enumerate(samplers):
        mask = choice == s
        samples += len(sampler)
        if not np.any(mask) or len(sampler) < 2:
            continue
        contributions = np.array(
            [
                float(np.sum(weights[mask] * norms_squared_on_grid(F, path)[indices][mask]))
                for path in sampler
            ]
        )
        variance += float(np.var(contributions, ddof=1)) / len(sampler)
    standard_error = math.sqrt(variance) / (2.0 * value) if value > 0 else 0.0
    logger.debug("H2 norm estimated", value=value, standard_error=standard_error)
    return NormEstimate(value, standard_error, samples, tuple(int(c) for c in choice))


def integrand_difference(F: Integrand, G: Integrand) -> Integrand:  # noqa: N803
    """``F - G`` for two functionals or two integrand sources."""
    functionals = isinstance(F, OperatorPathFunctional), isinstance(G, OperatorPathFunctional)
    if all(functionals):
        return F - G
    if any(functionals):
        raise ValidationError("cannot subtract a functional and an integrand", "integrand")
    return DifferenceIntegrand(F, G)
