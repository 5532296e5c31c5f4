"""Pathwise quadratic variation along crossing partitions and the process ``S``-squared."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import get_observability
from pathcalc.core.common.validation import (
    validate_non_negative,
    validate_one_of,
    validate_positive,
)

from .model import CrossingPartition, FloatArray, QvPath, SamplePath, require_same_grid
from .partition import crossing_partition

logger = StructuredLogger(__name__)

QvMethod = Literal["norm", "increment"]


@dataclass(frozen=True)
class QvSettings:
    """Configuration of the adaptive level search.

    Attributes:
        m_max: Finest crossing level tried.
        tol: Sup-norm tolerance between consecutive levels.
        min_intervals: Intervals a partition needs before convergence may be declared.
        method: ``norm`` sums squared differences of norms, ``increment`` sums squared
            norms of increments along the same partition.
    """

    m_max: int = 20
    tol: float = 0.05
    min_intervals: int = 32
    method: QvMethod = "norm"

    def __post_init__(self) -> None:
        validate_positive(self.m_max, "m_max")
        validate_positive(self.tol, "tol")
        validate_non_negative(self.min_intervals, "min_intervals")
        validate_one_of(self.method, ("norm", "increment"), "method")


class QvEstimate(NamedTuple):
    """Result of the adaptive level search."""

    qv: QvPath
    m_used: int
    converged: bool


def _level_terms(path: SamplePath, stops: np.ndarray, method: QvMethod) -> FloatArray:
    if method == "norm":
        norms = path.norms()[stops]
        return np.diff(norms) ** 2
    steps = np.diff(path.values[stops], axis=0)
    return np.sum(steps * steps, axis=1)


def qv_from_partition(
    path: SamplePath,
    partition: CrossingPartition,
    *,
    method: QvMethod = "norm",
    converged: bool | None = None,
) -> QvPath:
    """Quadratic variation sum along a given partition.

    The sum is exact at every stop and held constant between stops, so the curve is
    nondecreasing and adapted.
    """
    stops = partition.stop_indices
    cumulative = np.concatenate(([0.0], np.cumsum(_level_terms(path, stops, method))))
    held = np.searchsorted(stops, np.arange(len(path)), side="right") - 1
    return QvPath(path.times, cumulative[held], level=partition.level, converged=converged)


def qv_at_level(path: SamplePath, m: int, *, method: QvMethod = "norm") -> QvPath:
    """Quadratic variation of ``path`` along its level-``m`` crossing partition."""
    return qv_from_partition(path, crossing_partition(path, m), method=method)


def quadratic_variation(
    path: SamplePath,
    m_max: int | None = None,
    tol: float | None = None,
    *,
    settings: QvSettings | None = None,
) -> QvEstimate:
    """Adaptive quadratic variation.

    Levels are refined from 0 until two consecutive levels agree within ``tol`` in sup
    norm, or until the threshold 2^-m drops below twice the largest one-step increment.
    In the latter case the last resolvable level is returned with ``converged`` false.
    Convergence is only declared when both compared partitions have at least
    ``min_intervals`` intervals, so that coarse levels which happen to agree are skipped.
    """
    settings = settings or QvSettings()
    m_max = settings.m_max if m_max is None else m_max
    tol = settings.tol if tol is None else tol
    validate_positive(m_max, "m_max")
    validate_positive(tol, "tol")
    hooks = get_observability()

    max_step = path.max_step()
    if max_step == 0.0:
        return QvEstimate(QvPath.zeros(path.times), 0, True)

    previous: QvPath | None = None
    previous_dense = False
    for m in range(m_max + 1):
        if m > 0 and 2.0**-m < 2.0 * max_step:
            break
        partition = crossing_partition(path, m)
        current = qv_from_partition(path, partition, method=settings.method)
        dense = partition.intervals >= settings.min_intervals
        hooks.record_qv_level(m, partition.intervals)
        if previous is not None and previous_dense and dense:
            gap = float(np.max(np.abs(current.qv - previous.qv)))
            logger.debug("QV level compared", level=m, gap=gap, intervals=partition.intervals)
            if gap < tol:
                hooks.record_qv_result(True)
                return QvEstimate(_mark(current, True), m, True)
        previous = current
        previous_dense = dense

    assert previous is not None
    level = previous.level if previous.level is not None else 0
    hooks.record_qv_result(False)
    logger.warning("QV level search did not converge", level=level, max_step=max_step, tol=tol)
    return QvEstimate(_mark(previous, False), level, False)


def _mark(qv: QvPath, converged: bool) -> QvPath:
    return QvPath(qv.times, qv.qv, level=qv.level, converged=converged)


def ss_process(path: SamplePath, qv: QvPath) -> SamplePath:
    """The process ``||w(t)||^2 - <w>_t`` as a scalar path."""
    require_same_grid(path.times, qv.times, "path", "qv")
    norms = path.norms()
    return SamplePath(path.times, norms * norms - qv.qv)


QvSource = Sequence[QvPath] | QvSettings | None


def qv_of(path: SamplePath, source: QvSource, index: int) -> QvPath:
    """The QV of path ``index``: taken from a list, or computed with the given settings."""
    if source is None or isinstance(source, QvSettings):
        return quadratic_variation(path, settings=source).qv
    qv = source[index]
    require_same_grid(path.times, qv.times, "path", "qv")
    return qv


def realized_variance(path: SamplePath) -> QvPath:
    """Running sum of squared one-step increments, the grid-level bracket."""
    steps = path.increments()
    out = np.zeros(len(path))
    np.cumsum(np.sum(steps * steps, axis=1), out=out[1:])
    return QvPath(path.times, out)
