"""Extraction of fast Cauchy subsequences from sequences of paths."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import NotCauchyError
from pathcalc.core.common.validation import ValidationError
from pathcalc.core.paths import SamplePath, require_same_grid


@dataclass(frozen=True)
class CauchyLimit:
    limit: SamplePath
    indices: tuple[int, ...]
    accuracy: float


def sup_distance(left: SamplePath, right: SamplePath) -> float:
    """``sup_t ||left_t - right_t||`` over the shared grid."""
    require_same_grid(left.times, right.times, "left", "right")
    return float(np.max(np.linalg.norm(left.values - right.values, axis=1)))


def _pair_bound(bounds: np.ndarray, start: int, end: int) -> float:
    if bounds.ndim == 2:
        return float(bounds[start, end])
    return float(np.sum(bounds[start:end]))


def cauchy_limit(seq: Sequence[SamplePath], bounds: ArrayLike | None = None) -> CauchyLimit:
    """Select ``n_0 < n_1 < ...`` with ``||X_{n_{k+1}} - X_{n_k}|| <= 2^-k``.

    ``bounds`` holds either consecutive bounds ``b_n >= ||X_{n+1} - X_n||`` (nonincreasing)
    or a full matrix ``b[n, m]``; by default consecutive sup distances are used. The last
    selected path represents the limit, with accuracy ``sum_{l>=k} 2^-l`` for k selected
    steps (0 when all bounds vanish).

    Raises:
        NotCauchyError: If the consecutive bounds increase or no step can be selected.
    """
    if not seq:
        raise ValidationError("sequence must be nonempty", "seq")
    if bounds is None:
        declared = np.array([sup_distance(a, b) for a, b in zip(seq, seq[1:])])
    else:
        declared = np.asarray(bounds, dtype=np.float64)
        expected = (len(seq),) * 2 if declared.ndim == 2 else (len(seq) - 1,)
        if declared.shape != expected:
            raise ValidationError(f"bounds must have shape {expected}", "bounds", declared.shape)
    if declared.ndim == 1 and np.any(np.diff(declared) > 0):
        raise NotCauchyError(declared.tolist())

    indices = [0]
    k = 0
    while indices[-1] < len(seq) - 1:
        start = indices[-1]
        step = next(
            (n for n in range(start + 1, len(seq)) if _pair_bound(declared, start, n) <= 2.0**-k),
            None,
        )
        if step is None:
            break
        indices.append(step)
        k += 1
    if len(seq) > 1 and k == 0:
        raise NotCauchyError(np.ravel(declared).tolist())
    accuracy = 0.0 if not np.any(declared) else 2.0 ** (1 - k)
    return CauchyLimit(seq[indices[-1]], tuple(indices), accuracy)
