"""Deterministic ensemble reductions.

Every reduction goes through a contiguous float64 array ordered by path index, so numpy's
pairwise summation gives the same bits regardless of how the per-path work was scheduled.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike


@dataclass(frozen=True)
class MeanEstimate:
    """Sample mean with its standard error."""

    mean: float
    standard_error: float
    samples: int

    def within(self, target: float, n_se: float = 3.0) -> bool:
        """Whether ``target`` lies within ``n_se`` standard errors of the mean."""
        return abs(self.mean - target) <= n_se * self.standard_error


def pairwise_sum(values: ArrayLike) -> float:
    """Pairwise sum of a one-dimensional array."""
    return float(np.add.reduce(np.ascontiguousarray(values, dtype=np.float64)))


def mean_estimate(values: ArrayLike) -> MeanEstimate:
    """Mean and standard error of per-path samples.

    A single sample or a constant sample has standard error 0.
    """
    array = np.ascontiguousarray(values, dtype=np.float64).ravel()
    n = array.size
    if n == 0:
        return MeanEstimate(0.0, 0.0, 0)
    mean = pairwise_sum(array) / n
    if n == 1:
        return MeanEstimate(mean, 0.0, 1)
    centered = array - mean
    variance = pairwise_sum(centered * centered) / (n - 1)
    return MeanEstimate(mean, float(np.sqrt(variance / n)), n)


def value_scale(*arrays: ArrayLike) -> float:
    """Magnitude used to turn relative tolerances into absolute ones (at least 1)."""
    scale = 1.0
    for array in arrays:
        values = np.asarray(array, dtype=np.float64)
        if values.size:
            scale = max(scale, float(np.max(np.abs(values))))
    return scale
