"""Nonanticipating operator-valued functionals of time and path history."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import DimensionMismatchError
from pathcalc.core.common.validation import validate_non_negative
from pathcalc.core.paths import SamplePath

from .operators import FloatArray, as_matrix, operator_norms

Evaluator = Callable[[float, SamplePath], ArrayLike]
GridEvaluator = Callable[[SamplePath], ArrayLike]
Modulus = tuple[Callable[[float], float], float]


@dataclass(frozen=True, eq=False)
class OperatorPathFunctional:
    """``F(t, w)`` with values in d_K x d_H matrices.

    ``evaluator`` receives the time and the path truncated at that time, so it cannot look
    ahead. ``grid_evaluator``, when given, returns the whole (n, d_K, d_H) stack in one call
    and must agree with ``evaluator`` on every grid time; it is how the built-in
    constructors stay fast.

    Attributes:
        modulus: Optional ``(rho, p)`` continuity bound used by the approximation error.
        lipschitz_in_time: Optional Lipschitz constant of ``t -> F(t, w)``.
    """

    evaluator: Evaluator
    shape: tuple[int, int]
    grid_evaluator: GridEvaluator | None = None
    modulus: Modulus | None = None
    lipschitz_in_time: float | None = None
    name: str = "functional"

    def __post_init__(self) -> None:
        if self.lipschitz_in_time is not None:
            validate_non_negative(self.lipschitz_in_time, "lipschitz_in_time")

    @property
    def d_K(self) -> int:  # noqa: N802
        return self.shape[0]

    @property
    def d_H(self) -> int:  # noqa: N802
        return self.shape[1]

    def at(self, t: float, history: SamplePath) -> FloatArray:
        """Value at time ``t`` given the path up to ``t``."""
        value = as_matrix(self.evaluator(t, history))
        if value.shape != self.shape:
            raise DimensionMismatchError(f"{self.name} value", self.shape, value.shape)
        return value

    def on_grid(self, path: SamplePath) -> FloatArray:
        """Values at every grid time of ``path``, shape (n, d_K, d_H)."""
        if self.grid_evaluator is not None:
            stack = np.asarray(self.grid_evaluator(path), dtype=np.float64)
            stack = stack.reshape(len(path), *self.shape)
        else:
            stack = np.stack(
                [self.at(float(t), path.truncated(i)) for i, t in enumerate(path.times)]
            )
        return stack

    def norms_squared_on_grid(self, path: SamplePath) -> FloatArray:
        """``||F_t||^2`` in operator norm at every grid time."""
        norms = operator_norms(self.on_grid(path))
        return norms * norms

    def __sub__(self, other: OperatorPathFunctional) -> OperatorPathFunctional:
        if other.shape != self.shape:
            raise DimensionMismatchError("functional shape", self.shape, other.shape)
        return OperatorPathFunctional(
            lambda t, history: self.at(t, history) - other.at(t, history),
            self.shape,
            grid_evaluator=lambda path: self.on_grid(path) - other.on_grid(path),
            name=f"({self.name} - {other.name})",
        )

    def scaled(self, factor: float) -> OperatorPathFunctional:
        """``factor * F``."""
        return OperatorPathFunctional(
            lambda t, history: factor * self.at(t, history),
            self.shape,
            grid_evaluator=lambda path: factor * self.on_grid(path),
            lipschitz_in_time=(
                None if self.lipschitz_in_time is None else abs(factor) * self.lipschitz_in_time
            ),
            name=f"{factor:g}*{self.name}",
        )

    @classmethod
    def constant(cls, value: ArrayLike, name: str = "constant") -> OperatorPathFunctional:
        matrix = as_matrix(value)
        matrix.setflags(write=False)

        def grid(path: SamplePath) -> FloatArray:
            return np.broadcast_to(matrix, (len(path), *matrix.shape))

        return cls(
            lambda t, history: matrix,
            matrix.shape,
            grid_evaluator=grid,
            lipschitz_in_time=0.0,
            name=name,
        )

    @classmethod
    def deterministic(
        cls,
        fn: Callable[[float], ArrayLike],
        shape: tuple[int, int] = (1, 1),
        *,
        lipschitz_in_time: float | None = None,
        name: str = "deterministic",
    ) -> OperatorPathFunctional:
        """A functional of time only."""

        def grid(path: SamplePath) -> FloatArray:
            return np.stack([as_matrix(fn(float(t))) for t in path.times])

        return cls(
            lambda t, history: fn(t),
            shape,
            grid_evaluator=grid,
            lipschitz_in_time=lipschitz_in_time,
            name=name,
        )

    @classmethod
    def markov(
        cls,
        fn: Callable[[FloatArray, FloatArray], ArrayLike],
        shape: tuple[int, int] = (1, 1),
        *,
        name: str = "markov",
    ) -> OperatorPathFunctional:
        """A functional of the current time and state.

        ``fn(times, states)`` is vectorized: ``times`` has shape (n,), ``states`` shape
        (n, d_H), and the result shape (n, d_K, d_H).
        """

        def single(t: float, history: SamplePath) -> FloatArray:
            out = np.asarray(fn(np.array([t]), history.values[-1:]), dtype=np.float64)
            return out.reshape(shape)

        return cls(
            single,
            shape,
            grid_evaluator=lambda path: fn(path.times, path.values),
            name=name,
        )
