"""Reference solutions used to check Picard limits."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import DimensionMismatchError
from pathcalc.core.common.validation import validate_finite, validate_strictly_increasing
from pathcalc.core.paths import QvPath, SamplePath, realized_variance, require_same_grid

from .spec import SdeSpec


def gbm_closed_form(
    x0: float, sigma0: float, path: SamplePath, qv: QvPath | None = None
) -> SamplePath:
    """``x0 exp(sigma0 (S_t - S_0) - sigma0^2 <S>_t / 2)``, solution of ``dX = sigma0 X dS``.

    Without ``qv`` the grid-level bracket is used, so the distance to a left-point
    solution on the same grid is the discretization error alone.
    """
    if path.dim != 1:
        raise DimensionMismatchError("path", 1, path.dim)
    bracket = qv if qv is not None else realized_variance(path)
    require_same_grid(bracket.times, path.times, "qv", "path")
    moved = path.values[:, 0] - path.values[0, 0]
    exponent = sigma0 * moved - 0.5 * sigma0 * sigma0 * bracket.qv
    return SamplePath(path.times, x0 * np.exp(exponent))


def euler_maruyama(spec: SdeSpec, path: SamplePath) -> SamplePath:
    """Explicit recursion ``X_{k+1} = X_k + mu dA_k + sigma dS_k`` on the path grid."""
    require_same_grid(spec.A.times, path.times, "driver", "path")
    if path.dim != spec.d_H:
        raise DimensionMismatchError("path", spec.d_H, path.dim)
    dA = spec.A.increments()[:, 0]  # noqa: N806
    dS = path.increments()  # noqa: N806
    out = np.empty((len(path), spec.d_K))
    out[0] = spec.x0
    for k, t in enumerate(path.times[:-1]):
        state = out[k]
        out[k + 1] = state + spec.drift_at(t, state) * dA[k] + spec.diffusion_at(t, state) @ dS[k]
    return SamplePath(path.times, out)


def affine_drift_solution(x0: float, a: float, times: ArrayLike) -> SamplePath:
    """``x0 e^{-t} + a (1 - e^{-t})``, solution of ``dX = (a - X) dt``."""
    grid = np.asarray(times, dtype=np.float64)
    validate_strictly_increasing(grid, "times")
    validate_finite([x0, a], "x0, a")
    decay = np.exp(-grid)
    return SamplePath(grid, x0 * decay + a * (1.0 - decay))
