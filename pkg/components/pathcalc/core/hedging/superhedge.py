"""Verification of superhedging certificates on path ensembles."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np

from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import get_observability
from pathcalc.core.common.validation import validate_non_negative, validate_positive
from pathcalc.core.execution import PoolSettings, map_paths
from pathcalc.core.paths import PathSet, QvSource, qv_of

from .payoffs import Payoff
from .strategies import Strategy, wealth

logger = StructuredLogger(__name__)


@dataclass(frozen=True)
class SuperhedgeSettings:
    """Verification tolerances.

    Attributes:
        tol: Absolute tolerance; defaults to ``1e-9 * (1 + |lambda|)``.
        tail_start: First strategy index of the terminal tail; defaults to the last one.
    """

    tol: float | None = None
    tail_start: int | None = None

    def __post_init__(self) -> None:
        if self.tol is not None:
            validate_positive(self.tol, "tol")
        if self.tail_start is not None:
            validate_non_negative(self.tail_start, "tail_start")

    def tolerance(self, lam: float) -> float:
        return self.tol if self.tol is not None else 1e-9 * (1.0 + abs(lam))


@dataclass(frozen=True)
class PathVerdict:
    """Margins of one path; both must be at least ``-tol`` for the path to pass."""

    index: int
    payoff: float
    admissibility_margin: float
    terminal_margin: float
    passed: bool


@dataclass(frozen=True)
class SuperhedgeReport:
    lam: float
    tol: float
    n_strategies: int
    truncation_index: int | None
    verdicts: tuple[PathVerdict, ...]
    diagnostic: str | None = None

    @property
    def passed(self) -> bool:
        return self.diagnostic is None and all(v.passed for v in self.verdicts)

    @property
    def failures(self) -> list[int]:
        return [v.index for v in self.verdicts if not v.passed]

    @property
    def worst_admissibility(self) -> float:
        return min(v.admissibility_margin for v in self.verdicts)

    @property
    def worst_terminal(self) -> float:
        return min(v.terminal_margin for v in self.verdicts)

    @property
    def max_payoff(self) -> float:
        return max(v.payoff for v in self.verdicts)


def _verify_path(
    index: int,
    *,
    lam: float,
    strategies: Sequence[Strategy],
    paths: PathSet,
    payoff: Payoff,
    qvs: QvSource,
    tail_start: int,
    tol: float,
) -> PathVerdict:
    path = paths[index]
    qv = qv_of(path, qvs, index)
    value = float(payoff(path, qv))
    if strategies:
        gains = np.stack([wealth(strategy, path, qv) for strategy in strategies])
    else:
        gains = np.zeros((1, len(path)))
    admissibility = lam + float(np.min(gains))
    terminal = lam + float(np.min(gains[tail_start:, -1])) - value
    return PathVerdict(
        index=index,
        payoff=value,
        admissibility_margin=admissibility,
        terminal_margin=terminal,
        passed=admissibility >= -tol and terminal >= -tol,
    )


def verify_superhedge(
    lam: float,
    strategies: Sequence[Strategy],
    paths: PathSet,
    payoff: Payoff,
    qvs: QvSource = None,
    *,
    settings: SuperhedgeSettings | None = None,
    pool: PoolSettings | None = None,
) -> SuperhedgeReport:
    """Check that capital ``lam`` and ``strategies`` superhedge ``payoff`` on every path.

    Admissibility: ``lam + (H^k . S)_t + (G^k . SS)_t >= -tol`` for every strategy k and
    grid time t. Terminal domination: ``lam`` plus the smallest terminal gain over the
    strategy tail from ``tail_start`` on is at least ``X - tol``. The verdict is relative
    to the sampled paths only.
    """
    validate_non_negative(lam, "lam")
    settings = settings or SuperhedgeSettings()
    tol = settings.tolerance(lam)
    tail_start = settings.tail_start if settings.tail_start is not None else len(strategies) - 1
    tail_start = min(max(tail_start, 0), max(len(strategies) - 1, 0))
    hooks = get_observability()
    with hooks.span("verify_superhedge", paths=len(paths), strategies=len(strategies)):
        verdicts = map_paths(
            partial(
                _verify_path,
                lam=lam,
                strategies=strategies,
                paths=paths,
                payoff=payoff,
                qvs=qvs,
                tail_start=tail_start,
                tol=tol,
            ),
            range(len(paths)),
            pool,
        )
    diagnostic = None
    max_payoff = max(v.payoff for v in verdicts)
    if not strategies and lam < max_payoff - tol:
        diagnostic = f"no strategies and capital {lam:.6g} below sup payoff {max_payoff:.6g}"
    report = SuperhedgeReport(
        lam=lam,
        tol=tol,
        n_strategies=len(strategies),
        truncation_index=tail_start if strategies else None,
        verdicts=tuple(verdicts),
        diagnostic=diagnostic,
    )
    hooks.record_verification(len(verdicts), len(report.failures))
    if not report.passed:
        hooks.record_violation("superhedge", diagnostic or f"{len(report.failures)} paths failed")
    logger.info(
        "Superhedge verified",
        paths=len(verdicts),
        failures=len(report.failures),
        lam=lam,
        passed=report.passed,
    )
    return report
