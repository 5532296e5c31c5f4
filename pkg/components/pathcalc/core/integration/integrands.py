"""Simple integrands and the rules that resolve them path by path."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Literal, Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pathcalc.core.common.exceptions import DimensionMismatchError, GridMismatchError
from pathcalc.core.common.validation import (
    ValidationError,
    validate_finite,
    validate_nondecreasing_indices,
    validate_positive,
)
from pathcalc.core.paths import SamplePath, first_exit, merge_stops, same_grid

from .functionals import OperatorPathFunctional
from .operators import FloatArray, as_matrix, operator_norms

Provenance = Literal["resolved", "rule"]
IndexArray = NDArray[np.intp]


def grid_index_at_or_after(times: FloatArray, t: float) -> int:
    """First grid index whose time is at least ``t`` (rounding noise tolerated)."""
    T = float(times[-1])
    index = int(np.searchsorted(times, t - 1e-12 * max(T, 1.0), side="left"))
    return min(index, times.size - 1)


@dataclass(frozen=True, eq=False)
class SimpleIntegrand:
    """``sum_n f_n 1_(tau_n, tau_{n+1}]`` resolved on one time grid.

    ``stops`` are grid indices from 0 to the last index; repeated stops give empty
    intervals. ``coeffs`` has shape (n_intervals, d_K, d_H).
    """

    times: FloatArray
    stops: IndexArray
    coeffs: FloatArray
    provenance: Provenance = "resolved"
    resolution_clamped: bool = False

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        stops = np.array(self.stops, dtype=np.intp)
        coeffs = np.array(self.coeffs, dtype=np.float64)
        validate_nondecreasing_indices(stops, times.size - 1, "stops")
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(-1, 1, 1)
        if coeffs.ndim != 3 or coeffs.shape[0] != stops.size - 1:
            raise ValidationError(
                f"coeffs must have shape ({stops.size - 1}, d_K, d_H)", "coeffs", coeffs.shape
            )
        validate_finite(coeffs, "coeffs")
        stops.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "stops", stops)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d_K(self) -> int:  # noqa: N802
        return int(self.coeffs.shape[1])

    @property
    def d_H(self) -> int:  # noqa: N802
        return int(self.coeffs.shape[2])

    @property
    def n_intervals(self) -> int:
        return int(self.coeffs.shape[0])

    @property
    def stop_times(self) -> FloatArray:
        return self.times[self.stops]

    def step_coefficients(self) -> FloatArray:
        """Coefficient acting on each grid step (t_i, t_{i+1}], shape (n - 1, d_K, d_H)."""
        steps = np.arange(self.times.size - 1)
        active = np.searchsorted(self.stops, steps, side="right") - 1
        return self.coeffs[active]

    def norms_squared(self) -> SimpleIntegrand:
        """Scalar integrand ``||f_n||^2`` in operator norm."""
        norms = operator_norms(self.coeffs)
        return replace(self, coeffs=(norms * norms).reshape(-1, 1, 1))

    def normalized(self) -> SimpleIntegrand:
        """Equivalent integrand without empty intervals or equal neighbours."""
        nonempty = np.flatnonzero(np.diff(self.stops) > 0)
        if nonempty.size == 0:
            return replace(
                self,
                stops=np.array([0, self.times.size - 1]),
                coeffs=np.zeros((1, self.d_K, self.d_H)),
            )
        coeffs = self.coeffs[nonempty]
        keep = [0]
        for n in range(1, coeffs.shape[0]):
            if not np.array_equal(coeffs[n], coeffs[keep[-1]]):
                keep.append(n)
        stops = np.append(self.stops[nonempty][keep], self.stops[-1])
        return replace(self, stops=stops, coeffs=coeffs[keep])

    def refine(self, stops: ArrayLike) -> SimpleIntegrand:
        """The same integrand expressed on the union of its stops and ``stops``."""
        merged = merge_stops(self.stops, np.asarray(stops, dtype=np.intp))
        if merged[0] != 0 or merged[-1] != self.times.size - 1:
            raise ValidationError("refining stops must lie on the grid", "stops")
        active = np.searchsorted(self.stops, merged[:-1], side="right") - 1
        return replace(self, stops=merged, coeffs=self.coeffs[active])

    def _aligned(self, other: SimpleIntegrand) -> tuple[SimpleIntegrand, SimpleIntegrand]:
        if not same_grid(self.times, other.times):
            raise GridMismatchError("integrand", "integrand")
        if self.coeffs.shape[1:] != other.coeffs.shape[1:]:
            raise DimensionMismatchError("integrand", self.coeffs.shape[1:], other.coeffs.shape[1:])
        return self.refine(other.stops), other.refine(self.stops)

    def __add__(self, other: SimpleIntegrand) -> SimpleIntegrand:
        left, right = self._aligned(other)
        return replace(left, coeffs=left.coeffs + right.coeffs, provenance="resolved")

    def __sub__(self, other: SimpleIntegrand) -> SimpleIntegrand:
        left, right = self._aligned(other)
        return replace(left, coeffs=left.coeffs - right.coeffs, provenance="resolved")

    def __mul__(self, factor: float) -> SimpleIntegrand:
        return replace(self, coeffs=float(factor) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> SimpleIntegrand:
        return self * -1.0

    def equivalent(self, other: SimpleIntegrand) -> bool:
        """Whether both integrands act identically on every grid step."""
        return same_grid(self.times, other.times) and bool(
            np.array_equal(self.step_coefficients(), other.step_coefficients())
        )

    @classmethod
    def zero(cls, times: ArrayLike, shape: tuple[int, int] = (1, 1)) -> SimpleIntegrand:
        grid = np.asarray(times, dtype=np.float64)
        return cls(grid, [0, grid.size - 1], np.zeros((1, *shape)))

    @classmethod
    def constant(cls, times: ArrayLike, value: ArrayLike) -> SimpleIntegrand:
        """One piece on (0, T]."""
        grid = np.asarray(times, dtype=np.float64)
        return cls(grid, [0, grid.size - 1], as_matrix(value)[None])

    @classmethod
    def from_stop_times(
        cls, times: ArrayLike, stop_times: ArrayLike, coeffs: ArrayLike
    ) -> SimpleIntegrand:
        """Integrand with deterministic stop times rounded up to the grid.

        ``stop_times`` lists the left ends tau_0 = 0 < tau_1 < ...; the horizon closes the
        last interval. ``coeffs`` holds one value per listed stop.
        """
        grid = np.asarray(times, dtype=np.float64)
        stops = [grid_index_at_or_after(grid, float(t)) for t in np.ravel(stop_times)]
        stops.append(grid.size - 1)
        matrices = np.stack([as_matrix(c) for c in _coefficient_list(coeffs)])
        return cls(grid, stops, matrices)


def _coefficient_list(coeffs: ArrayLike) -> list[ArrayLike]:
    array = np.asarray(coeffs, dtype=np.float64)
    if array.ndim <= 1:
        return list(np.atleast_1d(array))
    return list(array)


class StoppingRule(Protocol):
    """Produces tau_{n+1} from tau_n on a path."""

    def next_stop(self, path: SamplePath, start: int) -> int:
        """First grid index after ``start`` at which the rule stops (or the last index)."""
        ...


@dataclass(frozen=True)
class DeterministicTimesRule:
    """Stops at fixed times, rounded up to the grid."""

    stop_times: tuple[float, ...]

    def next_stop(self, path: SamplePath, start: int) -> int:
        for t in self.stop_times:
            index = grid_index_at_or_after(path.times, t)
            if index > start:
                return index
        return path.last_index


@dataclass(frozen=True)
class CrossingTimesRule:
    """Stops once the path has moved ``epsilon`` away from its state at the last stop."""

    epsilon: float

    def __post_init__(self) -> None:
        validate_positive(self.epsilon, "epsilon")

    def next_stop(self, path: SamplePath, start: int) -> int:
        found = first_exit(path.values, start, self.epsilon)
        return path.last_index if found < 0 else found


@dataclass(frozen=True)
class HittingRule:
    """Stops at the first index where ``condition(prefix, start)`` holds.

    The condition only ever sees the path truncated at the candidate index.
    """

    condition: Callable[[SamplePath, int], bool]

    def next_stop(self, path: SamplePath, start: int) -> int:
        for index in range(start + 1, path.last_index):
            if self.condition(path.truncated(index), start):
                return index
        return path.last_index


CoefficientSource = OperatorPathFunctional | Callable[[SamplePath], ArrayLike]


@dataclass(frozen=True, eq=False)
class RuleIntegrand:
    """An integrand given by a stopping rule and a coefficient source.

    At each stop tau_n the coefficient source receives only the path truncated at tau_n;
    an :class:`OperatorPathFunctional` is evaluated at time t_{tau_n}.
    """

    stopping: StoppingRule
    coefficient: CoefficientSource
    max_intervals: int = 1_000_000
    name: str = "rule"

    def coefficient_at(self, path: SamplePath, index: int) -> FloatArray:
        history = path.truncated(index)
        if isinstance(self.coefficient, OperatorPathFunctional):
            return self.coefficient.at(float(path.times[index]), history)
        return as_matrix(self.coefficient(history))

    def resolve(self, path: SamplePath) -> SimpleIntegrand:
        """Resolve stops and coefficients on ``path``."""
        stops = [0]
        coeffs = []
        while stops[-1] < path.last_index and len(coeffs) < self.max_intervals:
            coeffs.append(self.coefficient_at(path, stops[-1]))
            stops.append(self.stopping.next_stop(path, stops[-1]))
        if stops[-1] != path.last_index:
            stops[-1] = path.last_index
        return SimpleIntegrand(path.times, stops, np.stack(coeffs), provenance="rule")


class IntegrandRule(Protocol):
    """Anything that resolves to a simple integrand on a given path."""

    name: str

    def resolve(self, path: SamplePath) -> SimpleIntegrand: ...


IntegrandSource = SimpleIntegrand | IntegrandRule


def resolve_integrand(source: IntegrandSource, path: SamplePath) -> SimpleIntegrand:
    """A per-path integrand: resolved integrands are checked against the path's grid."""
    if not isinstance(source, SimpleIntegrand):
        return source.resolve(path)
    if not same_grid(source.times, path.times):
        raise GridMismatchError("integrand", "path")
    return source


@dataclass(frozen=True, eq=False)
class DifferenceIntegrand:
    """``left - right``, resolved path by path."""

    left: IntegrandSource
    right: IntegrandSource

    @property
    def name(self) -> str:
        return f"({_name_of(self.left)} - {_name_of(self.right)})"

    def resolve(self, path: SamplePath) -> SimpleIntegrand:
        return resolve_integrand(self.left, path) - resolve_integrand(self.right, path)


def _name_of(source: IntegrandSource) -> str:
    return "simple" if isinstance(source, SimpleIntegrand) else source.name
