"""Crossing-time partitions of a discretized path."""

from __future__ import annotations

import numpy as np

from pathcalc.core.common.validation import validate_non_negative

from .model import CrossingPartition, FloatArray, SamplePath

_INITIAL_WINDOW = 32


def _distances(values: FloatArray, anchor: FloatArray) -> FloatArray:
    if values.shape[1] == 1:
        return np.abs(values[:, 0] - anchor[0])
    return np.linalg.norm(values - anchor, axis=1)


def first_exit(
    values: FloatArray, start: int, epsilon: float, window: int = _INITIAL_WINDOW
) -> int:
    """First index after ``start`` at distance at least ``epsilon`` from ``values[start]``.

    Returns -1 when the path never leaves the ball. The look-ahead window doubles after
    every miss, so the work is proportional to the distance to the exit.
    """
    last = values.shape[0] - 1
    anchor = values[start]
    low = start + 1
    width = window
    while low <= last:
        high = min(last + 1, low + width)
        hits = np.flatnonzero(_distances(values[low:high], anchor) >= epsilon)
        if hits.size:
            return low + int(hits[0])
        low = high
        width *= 2
    return -1


def crossing_stops(values: FloatArray, epsilon: float) -> np.ndarray:
    """Indices of successive first exits from balls of radius ``epsilon``.

    Each stop is the first index after the previous stop whose distance from the state at
    the previous stop is at least ``epsilon``. The final index is always appended. The
    total work is linear in the grid length.
    """
    last = values.shape[0] - 1
    stops = [0]
    start = 0
    window = _INITIAL_WINDOW
    while start < last:
        found = first_exit(values, start, epsilon, window)
        if found < 0:
            break
        window = max(_INITIAL_WINDOW, 2 * (found - start))
        stops.append(found)
        start = found
    if stops[-1] != last:
        stops.append(last)
    return np.asarray(stops, dtype=np.intp)


def crossing_partition(path: SamplePath, m: int) -> CrossingPartition:
    """Level-``m`` crossing partition of ``path`` (threshold 2^-m)."""
    validate_non_negative(m, "m")
    return CrossingPartition(m, crossing_stops(path.values, 2.0**-m))


def merge_stops(*stop_sets: np.ndarray) -> np.ndarray:
    """Sorted union of several stop index sets."""
    return np.unique(np.concatenate([np.asarray(s, dtype=np.intp) for s in stop_sets]))
