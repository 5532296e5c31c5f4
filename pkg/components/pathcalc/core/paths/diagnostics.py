"""Advisory membership diagnostics for the prediction set of slope-bounded paths."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import get_observability
from pathcalc.core.common.validation import (
    validate_in_range,
    validate_non_negative,
    validate_positive,
)

from .model import PredictionSetSpec, QvPath, SamplePath, require_same_grid

logger = StructuredLogger(__name__)

Verdict = Literal["true", "false", "indeterminate"]


@dataclass(frozen=True)
class XiSettings:
    """Tuning of the membership diagnostic.

    Attributes:
        grid_slack: Relative slack on the slope bound.
        holder_alpha: Exponent of the Hoelder diagnostic.
        z_margin: Extra standard deviations tolerated before a step or window is flagged.
        min_window_crossings: Expected crossings a window needs before its slope is judged.
        holder_bound: If set, a Hoelder constant above it makes the verdict false.
    """

    grid_slack: float = 0.05
    holder_alpha: float = 0.4
    z_margin: float = 3.0
    min_window_crossings: float = 8.0
    holder_bound: float | None = None

    def __post_init__(self) -> None:
        validate_non_negative(self.grid_slack, "grid_slack")
        validate_in_range(self.holder_alpha, 0.0, 1.0, "holder_alpha")
        validate_non_negative(self.z_margin, "z_margin")
        validate_positive(self.min_window_crossings, "min_window_crossings")
        if self.holder_bound is not None:
            validate_positive(self.holder_bound, "holder_bound")


@dataclass(frozen=True)
class XiReport:
    """Outcome of :func:`check_xi_c`.

    ``max_slope`` is the largest forward difference quotient of the QV curve over a
    single grid cell; ``window_slope`` the largest slope over the dyadic windows that
    were long enough to be judged.
    """

    slope_bound: float
    max_slope: float
    max_step_ratio: float
    step_threshold: float
    window_slope: float
    window_excess: float
    windows_checked: int
    holder_alpha: float
    holder_constant: float
    qv_converged: bool
    verdict: Verdict
    reasons: tuple[str, ...] = field(default_factory=tuple)

    @property
    def member(self) -> bool | None:
        """The verdict as a tri-state flag."""
        return {"true": True, "false": False, "indeterminate": None}[self.verdict]


def holder_constant(path: SamplePath, alpha: float) -> float:
    """Largest ``||w(t) - w(s)|| / |t - s|^alpha`` over dyadic index lags."""
    n = len(path)
    best = 0.0
    lag = 1
    while lag < n:
        diffs = path.values[lag:] - path.values[:-lag]
        spans = path.times[lag:] - path.times[:-lag]
        ratios = np.linalg.norm(diffs, axis=1) / spans**alpha
        best = max(best, float(np.max(ratios)))
        lag *= 2
    return best


def _window_check(
    qv: QvPath, bound: float, epsilon: float, edge: float, settings: XiSettings
) -> tuple[float, float, int]:
    times = qv.times
    T = float(times[-1])
    min_span = settings.min_window_crossings * epsilon * epsilon / bound
    windows: list[tuple[float, float]] = []
    level = 0
    while True:
        span = T / 2**level
        if span < min_span or 2**level > times.size:
            break
        slopes = []
        excesses = []
        starts = np.searchsorted(times, np.arange(2**level) * span, side="left")
        ends = np.searchsorted(times, (np.arange(2**level) + 1) * span, side="right") - 1
        for start, end in zip(starts, ends, strict=True):
            h = float(times[end] - times[start])
            if end - start < 2 or h < min_span:
                continue
            rise = float(qv.qv[end] - qv.qv[start])
            noise = math.sqrt((2.0 / 3.0) * epsilon * epsilon * bound * h)
            slopes.append(rise / h)
            excesses.append((rise - bound * h - edge) / noise)
        windows.extend(zip(slopes, excesses, strict=True))
        level += 1
    if not windows:
        return 0.0, -math.inf, 0
    slopes, excesses = zip(*windows, strict=True)
    return max(slopes), max(excesses), len(windows)


def check_xi_c(
    path: SamplePath,
    qv: QvPath,
    spec: PredictionSetSpec,
    settings: XiSettings | None = None,
) -> XiReport:
    """Diagnose whether ``path`` looks like a member of the slope-``c`` prediction set.

    A single grid step whose size is implausible for slope ``c`` makes the verdict false,
    as does a dyadic window whose QV rise exceeds ``c`` times its length by more than the
    crossing estimator's resolution allowance. Otherwise the verdict is true when the QV
    level search converged and indeterminate when it did not.
    """
    settings = settings or XiSettings()
    require_same_grid(path.times, qv.times, "path", "qv")
    bound = spec.c * (1.0 + settings.grid_slack)
    reasons: list[str] = []

    dt = np.diff(path.times)
    steps = np.linalg.norm(path.increments(), axis=1) if len(path) > 1 else np.zeros(0)
    ratios = steps / np.sqrt(bound * dt) if steps.size else np.zeros(1)
    max_step_ratio = float(np.max(ratios))
    n_steps = max(steps.size, 1)
    step_threshold = (
        math.sqrt(path.dim) + math.sqrt(2.0 * math.log(2.0 * n_steps)) + settings.z_margin
    )
    if max_step_ratio > step_threshold:
        reasons.append(f"grid step {max_step_ratio:.3g} sd above slope bound")

    slopes = np.diff(qv.qv) / dt if dt.size else np.zeros(1)
    max_slope = float(np.max(slopes))

    window_slope, window_excess, windows_checked = 0.0, -math.inf, 0
    if qv.level is not None:
        epsilon = 2.0**-qv.level
        edge = 2.0 * (epsilon + path.max_step()) ** 2
        window_slope, window_excess, windows_checked = _window_check(
            qv, bound, epsilon, edge, settings
        )
        window_threshold = math.sqrt(2.0 * math.log(2.0 * max(windows_checked, 1)))
        if windows_checked and window_excess > window_threshold + settings.z_margin:
            reasons.append(f"window slope {window_slope:.6g} exceeds bound {bound:.6g}")

    holder = holder_constant(path, settings.holder_alpha)
    if settings.holder_bound is not None and holder > settings.holder_bound:
        reasons.append(f"Hoelder constant {holder:.6g} exceeds {settings.holder_bound:.6g}")

    converged = bool(qv.converged)
    verdict: Verdict
    if reasons:
        verdict = "false"
        get_observability().record_violation("xi_c", "; ".join(reasons))
    elif converged:
        verdict = "true"
    else:
        verdict = "indeterminate"
    logger.debug("Membership diagnosed", verdict=verdict, max_step_ratio=max_step_ratio)
    return XiReport(
        slope_bound=bound,
        max_slope=max_slope,
        max_step_ratio=max_step_ratio,
        step_threshold=step_threshold,
        window_slope=window_slope,
        window_excess=window_excess,
        windows_checked=windows_checked,
        holder_alpha=settings.holder_alpha,
        holder_constant=holder,
        qv_converged=converged,
        verdict=verdict,
        reasons=tuple(reasons),
    )
