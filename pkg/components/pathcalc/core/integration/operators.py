"""Bounded operators between finite-dimensional truncations, stored as matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pathcalc.core.common.validation import ValidationError, validate_finite

FloatArray = NDArray[np.float64]


def as_matrix(value: ArrayLike) -> FloatArray:
    """Read a scalar, vector or matrix as a (d_K, d_H) matrix; vectors become rows."""
    array = np.asarray(value, dtype=np.float64)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(1, -1)
    if array.ndim != 2:
        raise ValidationError("operator must be at most two-dimensional", "entries", array.shape)
    return array


@dataclass(frozen=True, eq=False)
class OperatorValue:
    """A d_K x d_H matrix acting from the state space into the integral's space."""

    entries: FloatArray

    def __post_init__(self) -> None:
        entries = as_matrix(self.entries).copy()
        validate_finite(entries, "entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.entries.shape[0]), int(self.entries.shape[1]))

    @property
    def adjoint(self) -> OperatorValue:
        """Transpose, the adjoint for the Euclidean inner products."""
        return OperatorValue(self.entries.T)

    @property
    def norm(self) -> float:
        return operator_norm(self)


def operator_norm(f: OperatorValue | ArrayLike) -> float:
    """Largest singular value."""
    entries = f.entries if isinstance(f, OperatorValue) else as_matrix(f)
    if 1 in entries.shape:
        return float(np.linalg.norm(entries.ravel()))
    return float(np.linalg.norm(entries, ord=2))


def operator_norms(coeffs: ArrayLike) -> FloatArray:
    """Operator norms of a stack of matrices with shape (n, d_K, d_H)."""
    stack = np.asarray(coeffs, dtype=np.float64)
    if stack.shape[0] == 0:
        return np.zeros(0)
    if stack.shape[1] == 1 or stack.shape[2] == 1:
        return np.sqrt(np.sum(stack * stack, axis=(1, 2)))
    return np.linalg.norm(stack, ord=2, axis=(1, 2))
