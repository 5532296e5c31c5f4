"""Pathwise integrals of simple integrands and left-point Stieltjes sums."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pathcalc.core.common.exceptions import DimensionMismatchError, SlopeBoundError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import validate_non_negative, validate_positive
from pathcalc.core.paths import QvPath, SamplePath, require_same_grid

from .functionals import OperatorPathFunctional
from .integrands import SimpleIntegrand, grid_index_at_or_after
from .operators import FloatArray, operator_norms

logger = StructuredLogger(__name__)


def _transform(coeffs: FloatArray, increments: FloatArray) -> FloatArray:
    """Cumulative sum of ``coeffs[i] @ increments[i]`` starting from 0."""
    if coeffs.shape[1] == 1 and coeffs.shape[2] == 1:
        terms = (coeffs[:, 0, 0] * increments[:, 0])[:, None]
    else:
        terms = np.einsum("ikh,ih->ik", coeffs, increments)
    out = np.zeros((increments.shape[0] + 1, coeffs.shape[1]))
    np.cumsum(terms, axis=0, out=out[1:])
    return out


def integrate_simple(F: SimpleIntegrand, N: SamplePath) -> SamplePath:  # noqa: N803
    """``(F . N)_t = sum_n f_n (N_{tau_{n+1} ^ t} - N_{tau_n ^ t})`` on N's grid.

    Raises:
        GridMismatchError: If F is resolved on another grid.
        DimensionMismatchError: If the coefficient columns do not match N's dimension.
    """
    require_same_grid(F.times, N.times, "integrand", "integrator")
    if F.d_H != N.dim:
        raise DimensionMismatchError("integrator", F.d_H, N.dim)
    return SamplePath(N.times, _transform(F.step_coefficients(), N.increments()))


def integrate_stieltjes(g: SamplePath, qv: QvPath) -> SamplePath:
    """Left-point Stieltjes integral ``sum g(t_i) (qv_{i+1} - qv_i)``."""
    require_same_grid(g.times, qv.times, "integrand", "qv")
    weights = g.scalar[:-1] * np.diff(qv.qv)
    out = np.zeros(len(g))
    np.cumsum(weights, out=out[1:])
    return SamplePath(g.times, out)


def driver_slope(A: SamplePath) -> float:  # noqa: N803
    """Largest absolute difference quotient of a scalar driver."""
    if len(A) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(A.scalar)) / np.diff(A.times)))


def check_driver(A: SamplePath, c: float, slack: float = 0.05) -> float:  # noqa: N803
    """Return the driver's slope, raising SlopeBoundError above ``c * (1 + slack)``."""
    validate_positive(c, "c")
    validate_non_negative(slack, "slack")
    slope = driver_slope(A)
    bound = c * (1.0 + slack)
    if slope > bound:
        raise SlopeBoundError(bound, slope)
    return slope


def integrate_fv(
    F: SimpleIntegrand | OperatorPathFunctional,  # noqa: N803
    A: SamplePath,  # noqa: N803
    *,
    path: SamplePath | None = None,
    c: float | None = None,
    slack: float = 0.05,
) -> SamplePath:
    """Left-point integral of F against a scalar finite-variation driver ``A``.

    A functional integrand is evaluated along ``path`` (default: ``A`` itself). The
    coefficients must map the real line, so their shape is (d_K, 1). When ``c`` is given
    the driver's slope is checked first.
    """
    if c is not None:
        check_driver(A, c, slack)
    if A.dim != 1:
        raise DimensionMismatchError("finite-variation driver", 1, A.dim)
    if isinstance(F, SimpleIntegrand):
        require_same_grid(F.times, A.times, "integrand", "driver")
        coeffs = F.step_coefficients()
    else:
        source = path or A
        require_same_grid(source.times, A.times, "path", "driver")
        coeffs = F.on_grid(source)[:-1]
    if coeffs.shape[2] != 1:
        raise DimensionMismatchError("finite-variation integrand columns", 1, coeffs.shape[2])
    return SamplePath(A.times, _transform(coeffs, A.increments()))


def fv_energy_bound(F: SimpleIntegrand, A: SamplePath, c: float) -> float:  # noqa: N803
    """``c^2 T sum ||f_i||^2 dt_i``, the discrete bound on ``sup_t ||(F . A)_t||^2``."""
    norms = operator_norms(F.step_coefficients())
    return c * c * A.T * float(np.sum(norms * norms * np.diff(A.times)))


def coerce_to_simple(
    F: OperatorPathFunctional,  # noqa: N803
    path: SamplePath,
    N: int,  # noqa: N803
) -> SimpleIntegrand:
    """Simple approximation of F with deterministic stops ``tau_n = nT/N``.

    The coefficient on (tau_n, tau_{n+1}] is F at tau_n given the path up to tau_n. When
    ``N`` exceeds the grid resolution, coinciding stops are merged and the result is
    flagged ``resolution_clamped``.
    """
    validate_positive(N, "N")
    targets = np.arange(N) * (path.T / N)
    raw = [grid_index_at_or_after(path.times, float(t)) for t in targets]
    stops = np.unique(raw)
    stops = stops[stops < path.last_index] if path.last_index > 0 else stops
    clamped = stops.size < N
    if clamped:
        logger.warning(
            "Coercion clamped to grid resolution", requested=N, available=int(stops.size)
        )
    if F.grid_evaluator is not None:
        coeffs = F.on_grid(path)[stops]
    else:
        coeffs = np.stack([F.at(float(path.times[i]), path.truncated(int(i))) for i in stops])
    return SimpleIntegrand(
        path.times,
        np.append(stops, path.last_index),
        coeffs,
        provenance="rule",
        resolution_clamped=bool(clamped),
    )


@dataclass(frozen=True, eq=False)
class CoercedIntegrand:
    """``coerce_to_simple(functional, path, pieces)`` as a per-path integrand source."""

    functional: OperatorPathFunctional
    pieces: int

    @property
    def name(self) -> str:
        return f"{self.functional.name}@{self.pieces}"

    def resolve(self, path: SamplePath) -> SimpleIntegrand:
        return coerce_to_simple(self.functional, path, self.pieces)
