"""Explicit superhedging strategies behind the weak BDG inequality."""

from __future__ import annotations

from dataclasses import replace
from typing import Literal, NamedTuple

import numpy as np

from pathcalc.core.common.exceptions import DimensionMismatchError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import validate_non_negative, validate_one_of
from pathcalc.core.integration import SimpleIntegrand, integrate_simple
from pathcalc.core.paths import (
    QvPath,
    QvSettings,
    SamplePath,
    crossing_partition,
    merge_stops,
    quadratic_variation,
    require_same_grid,
)

from .ito import tilde_integrand

logger = StructuredLogger(__name__)

CertifyMode = Literal["direction", "coordinatewise"]


class BdgStrategy(NamedTuple):
    """Strategy pair in ``S`` and ``SS`` plus the capital it needs on one path."""

    H: SimpleIntegrand
    G: SimpleIntegrand
    lambda_core: float


def refining_stops(F: SimpleIntegrand, path: SamplePath, m: int | None) -> np.ndarray:  # noqa: N803
    """F's stops merged with the crossing partitions of levels 0..m (all grid indices if None).

    The stop sets are nested in ``m``.
    """
    if m is None:
        return np.arange(len(path), dtype=np.intp)
    validate_non_negative(m, "m")
    levels = [crossing_partition(path, level).stop_indices for level in range(m + 1)]
    return merge_stops(F.stops, *levels)


def capital_core(F: SimpleIntegrand, qv: QvPath) -> float:  # noqa: N803
    """``4 (||F||^2 . <S>)_T``."""
    weights = F.norms_squared()
    integral = integrate_simple(weights, SamplePath(qv.times, qv.qv))
    return 4.0 * float(integral.values[-1, 0])


def _doob_strategy(
    F: SimpleIntegrand, path: SamplePath, qv: QvPath, stops: np.ndarray  # noqa: N803
) -> BdgStrategy:
    refined = F.refine(stops)
    integral = integrate_simple(F, path).values
    x = integral[refined.stops[:-1]]
    sizes = np.linalg.norm(x, axis=1)
    running = np.maximum.accumulate(sizes)
    directions = np.divide(x, sizes[:, None], out=np.zeros_like(x), where=sizes[:, None] > 0)
    doob = -4.0 * running[:, None] * np.einsum("nk,nkh->nh", directions, refined.coeffs)
    tilde = tilde_integrand(F, path).refine(refined.stops)
    H = replace(refined, coeffs=4.0 * tilde.coeffs + doob[:, None, :], provenance="resolved")
    G = F.norms_squared() * 4.0
    return BdgStrategy(H, G, capital_core(F, qv))


def _resolve_qv(path: SamplePath, qv: QvPath | None, settings: QvSettings | None) -> QvPath:
    if qv is None:
        return quadratic_variation(path, settings=settings).qv
    require_same_grid(path.times, qv.times, "path", "qv")
    return qv


def bdg_strategy(
    F: SimpleIntegrand,  # noqa: N803
    path: SamplePath,
    m: int | None,
    *,
    qv: QvPath | None = None,
    settings: QvSettings | None = None,
) -> BdgStrategy:
    """Superhedging strategy for ``max_n (F . S)^2`` over the level-``m`` refinement.

    ``H = 4 F~ + H~`` where H~ trades ``-4 max_{i<=n} |x_i| sgn(x_n) f_n`` on
    (sigma_n, sigma_{n+1}] with ``x_n = (F . S)_{sigma_n}``, and ``G = 4 ||F||^2``. On
    the path, ``max_n (F . S^t)^2_{sigma_n} <= lambda_core + (H . S)_t + (G . SS)_t`` at
    every grid time t.

    Raises:
        DimensionMismatchError: If F is not real-valued.
    """
    if F.d_K != 1:
        raise DimensionMismatchError("BDG integrand values", 1, F.d_K)
    stops = refining_stops(F, path, m)
    strategy = _doob_strategy(F, path, _resolve_qv(path, qv, settings), stops)
    logger.debug("BDG strategy built", level=m, stops=int(stops.size), core=strategy.lambda_core)
    return strategy


def bdg_strategy_vector(
    F: SimpleIntegrand,  # noqa: N803
    path: SamplePath,
    m: int | None,
    *,
    qv: QvPath | None = None,
    settings: QvSettings | None = None,
    mode: CertifyMode = "direction",
) -> BdgStrategy:
    """BDG strategy for integrands with values in a finite-dimensional space.

    ``direction`` trades along ``x_n / ||x_n||`` with the running maximum of ``||x_n||``
    and needs ``4 (||F||^2 . <S>)_T`` in operator norm. ``coordinatewise`` sums the scalar
    strategies of each output coordinate; its capital adds up the coordinate rows.
    """
    validate_one_of(mode, ("direction", "coordinatewise"), "mode")
    qv = _resolve_qv(path, qv, settings)
    if mode == "direction" or F.d_K == 1:
        return _doob_strategy(F, path, qv, refining_stops(F, path, m))
    parts = [
        bdg_strategy(replace(F, coeffs=F.coeffs[:, k : k + 1, :]), path, m, qv=qv)
        for k in range(F.d_K)
    ]
    H = parts[0].H
    G = parts[0].G
    for part in parts[1:]:
        H = H + part.H
        G = G + part.G
    return BdgStrategy(H, G, sum(part.lambda_core for part in parts))
