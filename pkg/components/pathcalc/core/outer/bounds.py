"""Monte Carlo lower bounds, duality intervals and empirical inequalities."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import get_observability
from pathcalc.core.common.statistics import MeanEstimate, mean_estimate, pairwise_sum
from pathcalc.core.common.validation import ValidationError
from pathcalc.core.execution import PoolSettings, map_paths
from pathcalc.core.hedging import Payoff, capital_core
from pathcalc.core.integration import IntegrandSource, integrate_simple, resolve_integrand
from pathcalc.core.paths import PathSet, QvSource, qv_of

from .certificates import HedgingCertificate

logger = StructuredLogger(__name__)


@dataclass(frozen=True)
class LowerBound:
    """Largest sampler mean of a payoff, with that sampler's standard error."""

    estimate: float
    standard_error: float
    samples: int
    sampler_index: int
    per_sampler: tuple[MeanEstimate, ...]

    def __iter__(self):  # noqa: ANN204
        return iter((self.estimate, self.standard_error))


@dataclass(frozen=True)
class BoundInterval:
    """``[lower, upper]`` bracket of the outer measure of a payoff."""

    lower: float
    standard_error: float
    upper: float
    samples: int
    hypothesis_checked: bool = True

    @property
    def consistent(self) -> bool:
        """Weak duality: ``lower - 3 SE <= upper``."""
        return self.lower - 3.0 * self.standard_error <= self.upper

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def relative_gap(self) -> float:
        return self.gap / self.upper if self.upper > 0 else 0.0

    def to_dict(self) -> dict[str, float | int | bool | str | None]:
        return {
            "lower": self.lower,
            "se": self.standard_error,
            "upper": self.upper,
            "gap": self.gap,
            "relative_gap": self.relative_gap,
            "samples": self.samples,
            "consistent": self.consistent,
            "note": None if self.hypothesis_checked else "hypothesis unchecked",
        }


def _payoff_value(index: int, *, payoff: Payoff, paths: PathSet, qvs: QvSource) -> float:
    path = paths[index]
    return float(payoff(path, qv_of(path, qvs, index)))


def payoff_values(
    payoff: Payoff, paths: PathSet, qvs: QvSource = None, pool: PoolSettings | None = None
) -> np.ndarray:
    """Payoff evaluated on every path, in path order."""
    values = map_paths(
        partial(_payoff_value, payoff=payoff, paths=paths, qvs=qvs), range(len(paths)), pool
    )
    return np.asarray(values, dtype=np.float64)


def _sources(samplers: Sequence[PathSet], qvs: Sequence[QvSource] | None) -> list[QvSource]:
    if qvs is None:
        return [None] * len(samplers)
    if len(qvs) != len(samplers):
        raise ValidationError("one QV source per sampler is required", "qvs", len(qvs))
    return list(qvs)


def mc_lower_bound(
    payoff: Payoff,
    samplers: Sequence[PathSet],
    qvs: Sequence[QvSource] | None = None,
    *,
    pool: PoolSettings | None = None,
) -> LowerBound:
    """Weak-duality lower bound: the largest mean of ``payoff`` over the samplers."""
    if not samplers:
        raise ValidationError("at least one sampler is required", "samplers")
    estimates = tuple(
        mean_estimate(payoff_values(payoff, sampler, source, pool))
        for sampler, source in zip(samplers, _sources(samplers, qvs), strict=True)
    )
    best = max(range(len(estimates)), key=lambda s: estimates[s].mean)
    chosen = estimates[best]
    logger.debug("Lower bound estimated", payoff=payoff.name, mean=chosen.mean, sampler=best)
    return LowerBound(
        chosen.mean, chosen.standard_error, sum(e.samples for e in estimates), best, estimates
    )


def duality_gap(
    payoff: Payoff,
    cert: HedgingCertificate,
    samplers: Sequence[PathSet],
    qvs: Sequence[QvSource] | None = None,
    *,
    pool: PoolSettings | None = None,
) -> BoundInterval:
    """Bracket the outer measure of ``payoff`` by a Monte Carlo lower bound and ``cert``.

    An interval whose lower end exceeds the certified upper end by three standard errors
    contradicts weak duality and is reported as a violation.
    """
    lower = mc_lower_bound(payoff, samplers, qvs, pool=pool)
    interval = BoundInterval(
        lower=lower.estimate,
        standard_error=lower.standard_error,
        upper=cert.lam,
        samples=lower.samples,
        hypothesis_checked=payoff.usc_known,
    )
    if not interval.consistent:
        get_observability().record_violation(
            "weak_duality", f"lower {interval.lower:.6g} above upper {interval.upper:.6g}"
        )
    logger.info(
        "Duality interval",
        lower=interval.lower,
        se=interval.standard_error,
        upper=interval.upper,
        consistent=interval.consistent,
    )
    return interval


@dataclass(frozen=True)
class IsometryGap:
    """Means of ``(F . S)_T^2`` and ``(||F||^2 . <S>)_T`` and of their paired difference."""

    integral_square: MeanEstimate
    weighted_qv: MeanEstimate
    difference: MeanEstimate

    def within(self, n_se: float = 3.0) -> bool:
        return self.difference.within(0.0, n_se)


def _isometry_terms(
    index: int, *, F: IntegrandSource, paths: PathSet, qvs: QvSource  # noqa: N803
) -> tuple[float, float]:
    path = paths[index]
    qv = qv_of(path, qvs, index)
    resolved = resolve_integrand(F, path)
    terminal = integrate_simple(resolved, path).values[-1]
    return float(np.sum(terminal * terminal)), capital_core(resolved, qv) / 4.0


def weak_isometry_gap(
    F: IntegrandSource,  # noqa: N803
    paths: PathSet,
    qvs: QvSource = None,
    *,
    pool: PoolSettings | None = None,
) -> IsometryGap:
    """Compare ``mean (F . S)_T^2`` with ``mean (||F||^2 . <S>)_T`` on a martingale sample."""
    terms = np.asarray(
        map_paths(partial(_isometry_terms, F=F, paths=paths, qvs=qvs), range(len(paths)), pool)
    )
    return IsometryGap(
        mean_estimate(terms[:, 0]),
        mean_estimate(terms[:, 1]),
        mean_estimate(terms[:, 0] - terms[:, 1]),
    )


def empirical_cauchy_schwarz(x: ArrayLike, y: ArrayLike) -> tuple[float, float]:
    """``(mean |x y|, sqrt(mean x^2) sqrt(mean y^2))`` for paired samples."""
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(y, dtype=np.float64).ravel()
    if a.size != b.size or a.size == 0:
        raise ValidationError("samples must be nonempty and paired", "y", (a.size, b.size))
    lhs = pairwise_sum(np.abs(a * b)) / a.size
    rhs = math.sqrt(pairwise_sum(a * a) / a.size) * math.sqrt(pairwise_sum(b * b) / b.size)
    return lhs, rhs
