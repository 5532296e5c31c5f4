"""Lipschitz compositions and the identification of K with its dual."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import LipschitzViolationError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import (
    ValidationError,
    validate_non_negative,
    validate_positive,
)
from pathcalc.core.integration import OperatorPathFunctional, as_matrix, operator_norm
from pathcalc.core.paths import SamplePath, path_rng, require_same_grid

logger = StructuredLogger(__name__)

StateMap = Callable[[float, np.ndarray], ArrayLike]
Process = SamplePath | Callable[[SamplePath], SamplePath]


def probe_lipschitz(
    f: StateMap,
    L: float,  # noqa: N803
    *,
    dim: int = 1,
    T: float = 1.0,  # noqa: N803
    scale: float = 1.0,
    n_probes: int = 256,
    seed: int = 0,
    rtol: float = 1e-9,
) -> float:
    """Largest ratio ``||f(t,k) - f(s,h)|| / (|t - s| + ||k - h||)`` over random probe pairs.

    Half of the pairs are far apart and half are close, so both global and local slopes
    are exercised.

    Raises:
        LipschitzViolationError: If a ratio exceeds ``L * (1 + rtol)``.
    """
    validate_non_negative(L, "L")
    validate_positive(n_probes, "n_probes")
    rng = path_rng(seed, 0)
    worst = 0.0
    for probe in range(n_probes):
        t, s = rng.uniform(0.0, T, size=2)
        k = rng.normal(0.0, scale, size=dim)
        if probe % 2:
            h = k + rng.normal(0.0, 1e-3 * scale, size=dim)
            s = min(max(t + rng.normal(0.0, 1e-3 * T), 0.0), T)
        else:
            h = rng.normal(0.0, scale, size=dim)
        distance = abs(t - s) + float(np.linalg.norm(k - h))
        if distance == 0.0:
            continue
        gap = operator_norm(as_matrix(f(float(t), k)) - as_matrix(f(float(s), h)))
        ratio = gap / distance
        if ratio > L * (1.0 + rtol):
            raise LipschitzViolationError(L, ratio, f"t={t:.6g}, s={s:.6g}")
        worst = max(worst, ratio)
    logger.debug("Lipschitz probe passed", declared=L, observed=worst, probes=n_probes)
    return worst


def compose_lipschitz(
    f: StateMap,
    L: float,  # noqa: N803
    Y: Process,  # noqa: N803
    *,
    dim: int | None = None,
    T: float | None = None,  # noqa: N803
    probe: bool = True,
    probe_scale: float = 1.0,
    name: str = "composition",
) -> OperatorPathFunctional:
    """The functional ``(t, w) -> f(t, Y_t(w))``.

    ``Y`` is either a fixed path on the grid or a nonanticipating process given as a map
    from paths to paths, such as ``lambda w: integrate_simple(F, w)``. The probe covers
    times in ``[0, T]``; ``T`` defaults to the horizon of a fixed path and to 1 for maps.
    """
    validate_positive(L, "L")
    if isinstance(Y, SamplePath):
        fixed = Y

        def process(path: SamplePath) -> np.ndarray:
            require_same_grid(fixed.times[: len(path)], path.times, "process", "path")
            return fixed.values[: len(path)]

        dim = fixed.dim
        horizon = fixed.T if T is None else T
        t0, y0 = 0.0, fixed.values[0]
    else:
        mapping = Y

        def process(path: SamplePath) -> np.ndarray:
            return mapping(path).values

        if dim is None:
            raise ValidationError("dim is required when Y is a process map", "dim")
        horizon = 1.0 if T is None else T
        t0, y0 = 0.0, np.zeros(dim)
    validate_positive(horizon, "T")
    if probe:
        probe_lipschitz(f, L, dim=dim, T=horizon, scale=probe_scale)
    shape = as_matrix(f(t0, y0)).shape

    def evaluator(t: float, history: SamplePath) -> np.ndarray:
        return as_matrix(f(t, process(history)[-1]))

    def grid(path: SamplePath) -> np.ndarray:
        states = process(path)
        return np.stack([as_matrix(f(float(t), x)) for t, x in zip(path.times, states)])

    return OperatorPathFunctional(evaluator, shape, grid_evaluator=grid, name=name)


def riesz_identify(Y: SamplePath) -> OperatorPathFunctional:  # noqa: N803
    """``Y_t`` seen as the functional ``k -> <Y_t, k>``, a row of shape (1, d_K)."""
    values = Y.values

    def grid(path: SamplePath) -> np.ndarray:
        require_same_grid(Y.times, path.times, "identified path", "path")
        return values[:, None, :]

    return OperatorPathFunctional(
        lambda t, history: values[len(history) - 1][None, :],
        (1, Y.dim),
        grid_evaluator=grid,
        name="riesz",
    )
