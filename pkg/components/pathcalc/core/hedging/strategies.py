"""Trading strategies in ``S`` and ``SS`` that resolve per path."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Protocol

import numpy as np

from pathcalc.core.common.exceptions import GridMismatchError
from pathcalc.core.common.validation import ValidationError, validate_non_negative
from pathcalc.core.integration import (
    IntegrandSource,
    SimpleIntegrand,
    integrate_simple,
    resolve_integrand,
)
from pathcalc.core.paths import QvPath, SamplePath, same_grid, ss_process

from .bdg import CertifyMode, bdg_strategy_vector

StrategyPair = tuple[SimpleIntegrand, SimpleIntegrand]


class Strategy(Protocol):
    """A strategy ``(H, G)``: H trades the state ``S``, G the second-order process ``SS``."""

    def resolve(self, path: SamplePath, qv: QvPath) -> StrategyPair:
        """Resolve the integrand pair on ``path``."""
        ...

    def to_spec(self) -> dict[str, Any]:
        """JSON-compatible description."""
        ...


def describe_integrand(source: IntegrandSource) -> dict[str, Any]:
    """JSON-compatible description of an integrand source."""
    if not isinstance(source, SimpleIntegrand):
        return {"rule": source.name}
    return {
        "stop_times": source.stop_times[:-1].tolist(),
        "coeffs": source.coeffs.tolist(),
    }


@dataclass(frozen=True)
class ZeroStrategy:
    """No trading."""

    def resolve(self, path: SamplePath, qv: QvPath) -> StrategyPair:
        return (
            SimpleIntegrand.zero(path.times, (1, path.dim)),
            SimpleIntegrand.zero(path.times),
        )

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "zero"}


@dataclass(frozen=True, eq=False)
class FixedStrategy:
    """A pair already resolved on one grid."""

    H: SimpleIntegrand
    G: SimpleIntegrand

    def __post_init__(self) -> None:
        if self.H.d_K != 1 or self.G.coeffs.shape[1:] != (1, 1):
            raise ValidationError("H must be a row integrand and G scalar", "strategy")
        if not same_grid(self.H.times, self.G.times):
            raise GridMismatchError("H", "G")

    def resolve(self, path: SamplePath, qv: QvPath) -> StrategyPair:
        if not same_grid(self.H.times, path.times):
            raise GridMismatchError("strategy", "path")
        return self.H, self.G

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "fixed", "H": describe_integrand(self.H), "G": describe_integrand(self.G)}


@dataclass(frozen=True, eq=False)
class BdgStrategyRule:
    """The BDG strategy of an integrand, rebuilt on every path at refinement ``level``."""

    integrand: IntegrandSource
    level: int | None
    mode: CertifyMode = "direction"

    def __post_init__(self) -> None:
        if self.level is not None:
            validate_non_negative(self.level, "level")

    def resolve(self, path: SamplePath, qv: QvPath) -> StrategyPair:
        F = resolve_integrand(self.integrand, path)  # noqa: N806
        strategy = bdg_strategy_vector(F, path, self.level, qv=qv, mode=self.mode)
        return strategy.H, strategy.G

    def to_spec(self) -> dict[str, Any]:
        return {
            "kind": "bdg",
            "level": "grid" if self.level is None else self.level,
            "mode": self.mode,
            "integrand": describe_integrand(self.integrand),
        }


@dataclass(frozen=True, eq=False)
class SumStrategy:
    """Sum of strategies."""

    parts: tuple[Strategy, ...]

    def resolve(self, path: SamplePath, qv: QvPath) -> StrategyPair:
        pairs = [part.resolve(path, qv) for part in self.parts]
        if not pairs:
            return ZeroStrategy().resolve(path, qv)
        H, G = pairs[0]  # noqa: N806
        for h, g in pairs[1:]:
            H, G = H + h, G + g  # noqa: N806
        return H, G

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "sum", "parts": [part.to_spec() for part in self.parts]}


@dataclass(frozen=True, eq=False)
class ScaledStrategy:
    """A strategy scaled by a nonnegative factor."""

    inner: Strategy
    factor: float

    def __post_init__(self) -> None:
        validate_non_negative(self.factor, "factor")

    def resolve(self, path: SamplePath, qv: QvPath) -> StrategyPair:
        H, G = self.inner.resolve(path, qv)  # noqa: N806
        return H * self.factor, G * self.factor

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "scaled", "factor": self.factor, "inner": self.inner.to_spec()}


def wealth(strategy: Strategy | StrategyPair, path: SamplePath, qv: QvPath) -> np.ndarray:
    """Gains ``(H . S)_t + (G . SS)_t`` of a strategy at every grid time."""
    H, G = strategy if isinstance(strategy, tuple) else strategy.resolve(path, qv)  # noqa: N806
    return integrate_simple(H, path).scalar + integrate_simple(G, ss_process(path, qv)).scalar


def total_strategy(strategies: Sequence[Strategy]) -> Strategy:
    """Single strategy trading the sum of ``strategies``."""
    if len(strategies) == 1:
        return strategies[0]
    return SumStrategy(tuple(strategies))
