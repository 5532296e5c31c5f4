"""Coefficients and settings of pathwise SDEs ``dX = mu(t, X) dA + sigma(t, X) dS``."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import DimensionMismatchError
from pathcalc.core.common.validation import (
    ValidationError,
    validate_finite,
    validate_non_negative,
    validate_positive,
)
from pathcalc.core.integration import check_driver, operator_norms
from pathcalc.core.limits import probe_lipschitz
from pathcalc.core.paths import SamplePath

FloatArray = np.ndarray
DriftFn = Callable[[FloatArray, FloatArray], ArrayLike]
DiffusionFn = Callable[[FloatArray, FloatArray], ArrayLike]


@dataclass(frozen=True, eq=False)
class SdeSpec:
    """An SDE driven by a finite-variation path ``A`` and the state path ``S``.

    ``mu(times, states)`` returns shape (n, d_K) and ``sigma(times, states)`` shape
    (n, d_K, d_H), for ``times`` of shape (n,) and ``states`` of shape (n, d_K). Both are
    probed for the declared Lipschitz constant ``L`` on construction.
    """

    x0: FloatArray
    mu: DriftFn
    sigma: DiffusionFn
    L: float
    A: SamplePath
    c: float
    d_H: int = 1
    slack: float = 0.05
    probe: bool = True
    name: str = "sde"
    probe_scale: float = field(default=1.0, repr=False)

    def __post_init__(self) -> None:
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=np.float64)).copy()
        validate_finite(x0, "x0")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        validate_non_negative(self.L, "L")
        validate_positive(self.c, "c")
        validate_positive(self.d_H, "d_H")
        if self.A.dim != 1:
            raise DimensionMismatchError("driver A", 1, self.A.dim)
        check_driver(self.A, self.c, self.slack)
        origin = np.zeros((1, self.d_K))
        drift_shape = np.shape(self.mu(np.zeros(1), origin))
        if drift_shape != (1, self.d_K):
            raise DimensionMismatchError("mu values", (1, self.d_K), drift_shape)
        diffusion_shape = np.shape(self.sigma(np.zeros(1), origin))
        if diffusion_shape != (1, self.d_K, self.d_H):
            raise DimensionMismatchError("sigma values", (1, self.d_K, self.d_H), diffusion_shape)
        if self.probe:
            for coefficient in (self.drift_at, self.diffusion_at):
                probe_lipschitz(
                    coefficient, self.L, dim=self.d_K, T=self.T, scale=self.probe_scale
                )

    @property
    def d_K(self) -> int:  # noqa: N802
        return int(self.x0.size)

    @property
    def T(self) -> float:  # noqa: N802
        return self.A.T

    def drift_at(self, t: float, state: FloatArray) -> FloatArray:
        return np.asarray(self.mu(np.array([t]), np.atleast_2d(state)), dtype=np.float64)[0]

    def diffusion_at(self, t: float, state: FloatArray) -> FloatArray:
        return np.asarray(self.sigma(np.array([t]), np.atleast_2d(state)), dtype=np.float64)[0]

    def drift_on(self, times: FloatArray, states: FloatArray) -> FloatArray:
        return np.asarray(self.mu(times, states), dtype=np.float64).reshape(-1, self.d_K)

    def diffusion_on(self, times: FloatArray, states: FloatArray) -> FloatArray:
        values = np.asarray(self.sigma(times, states), dtype=np.float64)
        return values.reshape(-1, self.d_K, self.d_H)

    def initial_scale(self) -> float:
        """``sup_t ||mu(t, x0)|| + sup_t ||sigma(t, x0)||`` over the driver's grid."""
        states = np.broadcast_to(self.x0, (len(self.A), self.d_K))
        drift = np.linalg.norm(self.drift_on(self.A.times, states), axis=1)
        diffusion = operator_norms(self.diffusion_on(self.A.times, states))
        return float(np.max(drift) + np.max(diffusion))


def time_driver(times: ArrayLike) -> SamplePath:
    """The clock ``A_t = t``."""
    grid = np.asarray(times, dtype=np.float64)
    return SamplePath(grid, grid)


def constant_drift(value: ArrayLike) -> DriftFn:
    row = np.atleast_1d(np.asarray(value, dtype=np.float64))
    return lambda times, states: np.broadcast_to(row, (np.size(times), row.size))


def affine_drift(a: float) -> DriftFn:
    """``mu(t, x) = a - x``, mean reversion towards ``a``."""
    return lambda times, states: a - np.asarray(states, dtype=np.float64)


def linear_diffusion(sigma0: float) -> DiffusionFn:
    """``sigma(t, x) = sigma0 x`` for scalar states and noise."""
    return lambda times, states: (sigma0 * np.asarray(states)).reshape(-1, 1, 1)


def constant_diffusion(matrix: ArrayLike) -> DiffusionFn:
    m = np.asarray(matrix, dtype=np.float64)
    m = m.reshape(1, 1) if m.ndim == 0 else m
    return lambda times, states: np.broadcast_to(m, (np.size(times), *m.shape))


@dataclass(frozen=True)
class PicardSettings:
    """Stopping rule and uniqueness diagnostic of the Picard iteration."""

    tol: float = 1e-4
    n_max: int = 30
    perturbation: float = 0.1
    check_uniqueness: bool = True

    def __post_init__(self) -> None:
        validate_positive(self.tol, "tol")
        validate_positive(self.n_max, "n_max")
        validate_non_negative(self.perturbation, "perturbation")


@dataclass(frozen=True, eq=False)
class PicardState:
    """Iterates after ``n`` sweeps and the sup-square gaps ``g^1..g^n``."""

    n: int
    X: tuple[SamplePath, ...]
    g: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if any(value < 0 for value in self.g):
            raise ValidationError("g entries must be nonnegative", "g")
