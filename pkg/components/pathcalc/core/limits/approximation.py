"""Integrals of non-simple integrands as limits of coerced simple approximations."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from pathcalc.core.common.exceptions import ResolutionError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import ValidationError, validate_positive
from pathcalc.core.integration import (
    CoercedIntegrand,
    DifferenceIntegrand,
    OperatorPathFunctional,
    coerce_to_simple,
    integrate_simple,
)
from pathcalc.core.outer import norm_h2, norm_h_inf
from pathcalc.core.paths import (
    PathSet,
    PredictionSetSpec,
    QvPath,
    QvSource,
    SamplePath,
    check_xi_c,
)

logger = StructuredLogger(__name__)


def default_schedule(n_steps: int) -> list[int]:
    """Dyadic piece counts 2, 4, ... up to a quarter of the grid steps."""
    validate_positive(n_steps, "n_steps")
    schedule = []
    pieces = 2
    while pieces <= n_steps // 4:
        schedule.append(pieces)
        pieces *= 2
    return schedule or [1]


def check_schedule(schedule: Sequence[int], n_steps: int) -> tuple[int, ...]:
    """Validate a piece-count schedule against the grid.

    Raises:
        ResolutionError: If the finest piece count exceeds the number of grid steps.
    """
    pieces = tuple(int(n) for n in schedule)
    if not pieces or pieces[0] < 1 or any(b <= a for a, b in zip(pieces, pieces[1:])):
        raise ValidationError("schedule must be a nonempty increasing list", "schedule", pieces)
    if pieces[-1] > n_steps:
        raise ResolutionError(pieces[-1], n_steps)
    return pieces


@dataclass(frozen=True)
class LimitApproximation:
    """Finest simple approximation of an integral plus a posteriori error control.

    ``level_errors[j]`` bounds the distance between levels j and j + 1 of the schedule;
    ``error_estimate`` is the last one (infinite when the schedule has one entry).
    """

    integral: SamplePath
    error_estimate: float
    level_errors: tuple[float, ...]
    schedule: tuple[int, ...]
    cauchy: bool
    clamped: bool
    membership: str


def _is_cauchy(errors: Sequence[float]) -> bool:
    return all(b <= a * (1.0 + 1e-12) + 1e-15 for a, b in zip(errors, errors[1:]))


def _finish(
    F: OperatorPathFunctional,  # noqa: N803
    path: SamplePath,
    qv: QvPath,
    c: float,
    pieces: tuple[int, ...],
    errors: list[float],
    mode: str,
) -> LimitApproximation:
    finest = coerce_to_simple(F, path, pieces[-1])
    membership = check_xi_c(path, qv, PredictionSetSpec(c, path.T, path.dim)).verdict
    if membership == "false":
        logger.warning("Path fails the slope diagnostic", mode=mode, c=c)
    cauchy = _is_cauchy(errors)
    if not cauchy:
        logger.warning("Approximation errors do not decrease", mode=mode, schedule=str(pieces))
    return LimitApproximation(
        integral=integrate_simple(finest, path),
        error_estimate=errors[-1] if errors else math.inf,
        level_errors=tuple(errors),
        schedule=pieces,
        cauchy=cauchy,
        clamped=finest.resolution_clamped,
        membership=membership,
    )


def _differences(
    F: OperatorPathFunctional, pieces: tuple[int, ...]  # noqa: N803
) -> list[DifferenceIntegrand]:
    return [
        DifferenceIntegrand(CoercedIntegrand(F, fine), CoercedIntegrand(F, coarse))
        for coarse, fine in zip(pieces, pieces[1:])
    ]


def integrate_h2(
    F: OperatorPathFunctional,  # noqa: N803
    path: SamplePath,
    qv: QvPath,
    c: float,
    schedule: Sequence[int] | None = None,
    *,
    paths: PathSet | None = None,
) -> LimitApproximation:
    """``(F . S)`` through simple approximations with the H2 error control.

    Successive approximations are compared by ``2 sqrt(c) ||F^{N_j} - F^{N_{j-1}}||``
    with the grid H2 norm estimated on ``paths`` (default: the path itself).
    """
    validate_positive(c, "c")
    n_steps = len(path) - 1
    pieces = check_schedule(schedule or default_schedule(n_steps), n_steps)
    sample = paths if paths is not None else [path]
    errors = [
        2.0 * math.sqrt(c) * norm_h2(difference, [sample]).value
        for difference in _differences(F, pieces)
    ]
    return _finish(F, path, qv, c, pieces, errors, "h2")


def integrate_hinf(
    F: OperatorPathFunctional,  # noqa: N803
    path: SamplePath,
    qv: QvPath,
    paths: PathSet,
    schedule: Sequence[int] | None = None,
    *,
    qvs: QvSource = None,
    c: float = 1.0,
) -> LimitApproximation:
    """``(F . S)`` through simple approximations with the H-infinity error control
    ``2 ||F^{N_j} - F^{N_{j-1}}||`` taken over ``paths``."""
    n_steps = len(path) - 1
    pieces = check_schedule(schedule or default_schedule(n_steps), n_steps)
    errors = [2.0 * norm_h_inf(difference, paths, qvs) for difference in _differences(F, pieces)]
    return _finish(F, path, qv, c, pieces, errors, "hinf")
