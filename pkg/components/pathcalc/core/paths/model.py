"""Domain types for discretized paths.

All types are immutable: arrays are copied on construction unless they are already
read-only, and are then marked read-only.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pathcalc.core.common.exceptions import GridMismatchError
from pathcalc.core.common.validation import (
    ValidationError,
    validate_finite,
    validate_nondecreasing_indices,
    validate_non_negative,
    validate_positive,
    validate_strictly_increasing,
)

FloatArray = NDArray[np.float64]
IndexArray = NDArray[np.intp]


def frozen_array(values: ArrayLike, dtype: type = np.float64) -> NDArray:
    """Return a read-only array, copying only when the input is writeable."""
    array = np.asarray(values, dtype=dtype)
    if array.flags.writeable:
        array = array.copy()
        array.setflags(write=False)
    return array


def same_grid(left: ArrayLike, right: ArrayLike) -> bool:
    """Whether two time grids are identical."""
    a = np.asarray(left)
    b = np.asarray(right)
    return a is b or (a.shape == b.shape and bool(np.array_equal(a, b)))


def require_same_grid(left: ArrayLike, right: ArrayLike, left_name: str, right_name: str) -> None:
    """Raise GridMismatchError unless both grids are identical."""
    if not same_grid(left, right):
        a = np.asarray(left)
        b = np.asarray(right)
        raise GridMismatchError(left_name, right_name, f"{a.size} vs {b.size} points")


@dataclass(frozen=True, eq=False)
class SamplePath:
    """A continuous path observed on a time grid.

    ``values`` has shape (n_points, dim); one-dimensional input is read as a scalar path.
    The grid starts at 0 and its last point is the horizon ``T``.
    """

    times: FloatArray
    values: FloatArray

    def __post_init__(self) -> None:
        times = frozen_array(self.times)
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        values = frozen_array(values)
        validate_strictly_increasing(times, "times")
        if times.size == 0 or times[0] != 0.0:
            raise ValidationError("times must start at 0", field="times")
        if values.ndim != 2 or values.shape[0] != times.size or values.shape[1] < 1:
            raise ValidationError(
                f"values must have shape ({times.size}, d)", field="values", value=values.shape
            )
        validate_finite(values, "values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> float:  # noqa: N802
        """Horizon of the path."""
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        """Dimension of the state space."""
        return int(self.values.shape[1])

    @property
    def last_index(self) -> int:
        """Index of the final grid point."""
        return int(self.times.size - 1)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def scalar(self) -> FloatArray:
        """Values of a one-dimensional path as a flat array."""
        if self.dim != 1:
            raise ValidationError("path is not scalar", field="values", value=self.dim)
        return self.values[:, 0]

    def norms(self) -> FloatArray:
        """Euclidean norm of the state at every grid time."""
        if self.dim == 1:
            return np.abs(self.values[:, 0])
        return np.linalg.norm(self.values, axis=1)

    def increments(self) -> FloatArray:
        """One-step increments, shape (n_points - 1, dim)."""
        return np.diff(self.values, axis=0)

    def max_step(self) -> float:
        """Largest one-step increment in norm."""
        if len(self) < 2:
            return 0.0
        steps = self.increments()
        return float(np.max(np.linalg.norm(steps, axis=1)))

    def stopped_at(self, index: int) -> SamplePath:
        """The path frozen at its value at ``index`` for all later grid times."""
        values = np.array(self.values)
        values[index + 1 :] = values[index]
        return SamplePath(self.times, values)

    def truncated(self, index: int) -> SamplePath:
        """The prefix of the path up to and including ``index``.

        The prefix shares the read-only arrays of this path and is not validated again.
        """
        if not 0 <= index <= self.last_index:
            raise ValidationError("index outside the grid", field="index", value=index)
        prefix = object.__new__(type(self))
        object.__setattr__(prefix, "times", self.times[: index + 1])
        object.__setattr__(prefix, "values", self.values[: index + 1])
        return prefix

    def with_values(self, values: ArrayLike) -> SamplePath:
        """A path on the same grid with new values."""
        return SamplePath(self.times, values)

    def index_of(self, t: float) -> int:
        """Index of the last grid time not after ``t``."""
        return max(int(np.searchsorted(self.times, t, side="right")) - 1, 0)

    @classmethod
    def constant(cls, times: ArrayLike, value: ArrayLike) -> SamplePath:
        """Constant path with the given value."""
        grid = np.asarray(times, dtype=np.float64)
        point = np.atleast_1d(np.asarray(value, dtype=np.float64))
        return cls(grid, np.broadcast_to(point, (grid.size, point.size)))


@dataclass(frozen=True, eq=False)
class CrossingPartition:
    """Stop indices at which a path has moved ``2**-level`` from its previous stop."""

    level: int
    stop_indices: IndexArray

    def __post_init__(self) -> None:
        validate_non_negative(self.level, "level")
        stops = frozen_array(self.stop_indices, dtype=np.intp)
        if stops.size < 1 or stops[0] != 0 or np.any(np.diff(stops) <= 0):
            raise ValidationError("stop indices must be increasing from 0", field="stop_indices")
        object.__setattr__(self, "stop_indices", stops)

    @property
    def epsilon(self) -> float:
        """Crossing threshold 2^-level."""
        return 2.0**-self.level

    @property
    def intervals(self) -> int:
        """Number of intervals between consecutive stops."""
        return int(self.stop_indices.size - 1)


@dataclass(frozen=True, eq=False)
class QvPath:
    """Quadratic variation of a path on the path's own grid.

    ``level`` is the crossing level it was computed at and ``converged`` records whether
    the adaptive level search met its tolerance; both are None for user-supplied curves.
    """

    times: FloatArray
    qv: FloatArray
    level: int | None = None
    converged: bool | None = None

    def __post_init__(self) -> None:
        times = frozen_array(self.times)
        qv = frozen_array(np.ravel(self.qv))
        if qv.size != times.size:
            raise ValidationError("qv must match the grid length", field="qv", value=qv.size)
        validate_finite(qv, "qv")
        if qv[0] != 0.0:
            raise ValidationError("qv must start at 0", field="qv", value=float(qv[0]))
        scale = max(1.0, float(np.max(np.abs(qv))))
        if np.any(np.diff(qv) < -1e-12 * scale):
            raise ValidationError("qv must be nondecreasing", field="qv")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "qv", qv)

    @property
    def terminal(self) -> float:
        """Quadratic variation at the horizon."""
        return float(self.qv[-1])

    @classmethod
    def zeros(cls, times: ArrayLike) -> QvPath:
        """Identically zero quadratic variation."""
        grid = np.asarray(times, dtype=np.float64)
        return cls(grid, np.zeros(grid.size), level=0, converged=True)


@dataclass(frozen=True)
class PredictionSetSpec:
    """Paths whose quadratic variation grows at most at rate ``c`` on [0, T]."""

    c: float
    T: float = 1.0
    d_H: int = 1

    def __post_init__(self) -> None:
        validate_positive(self.c, "c")
        validate_positive(self.T, "T")
        validate_positive(self.d_H, "d_H")


class SamplerLaw(Protocol):
    """A law that generates path `index` of an ensemble deterministically from a seed."""

    @property
    def tag(self) -> str: ...

    def generate(
        self, times: FloatArray, dim: int, seed: int | None, index: int, offset: float
    ) -> FloatArray: ...

    def max_rate(self) -> float | None: ...


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """A reproducible collection of paths on one shared grid.

    Random ensembles are not stored: path ``i`` is regenerated from ``(seed, i)`` by its
    law on every access, which keeps memory flat for large ensembles and makes
    regeneration bit-identical by construction.
    """

    times: FloatArray
    n_paths: int
    law: SamplerLaw
    seed: int | None = None
    dim: int = 1
    offset: float = 0.0
    _materialized: list[SamplePath] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", frozen_array(self.times))
        validate_positive(self.n_paths, "n_paths")
        validate_positive(self.dim, "dim")

    @property
    def measure_tag(self) -> str:
        """Descriptor of the generating law."""
        return self.law.tag

    @property
    def T(self) -> float:  # noqa: N802
        """Horizon of the shared grid."""
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.n_paths

    def __getitem__(self, index: int) -> SamplePath:
        if not -self.n_paths <= index < self.n_paths:
            raise IndexError(index)
        index %= self.n_paths
        if self._materialized is not None:
            return self._materialized[index]
        values = self.law.generate(self.times, self.dim, self.seed, index, self.offset)
        return SamplePath(self.times, values)

    def __iter__(self):  # noqa: ANN204
        for index in range(self.n_paths):
            yield self[index]

    @property
    def paths(self) -> list[SamplePath]:
        """All paths as a list (materializes the ensemble)."""
        return [self[index] for index in range(self.n_paths)]

    def cached(self) -> PathEnsemble:
        """A copy that keeps every path in memory after generating it once."""
        return PathEnsemble(
            self.times,
            self.n_paths,
            self.law,
            self.seed,
            self.dim,
            self.offset,
            self.paths,
        )

    def values_array(self) -> FloatArray:
        """Stacked values, shape (n_paths, n_points, dim)."""
        return np.stack([path.values for path in self])


PathSet = PathEnsemble | Sequence[SamplePath]
