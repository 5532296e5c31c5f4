"""Payoff functionals evaluated on a path and its quadratic variation."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from pathcalc.core.common.exceptions import ConfigError
from pathcalc.core.common.validation import validate_non_negative
from pathcalc.core.integration import IntegrandSource, integrate_simple, resolve_integrand
from pathcalc.core.paths import QvPath, SamplePath


class Payoff(Protocol):
    """``X(w)``; ``usc_known`` is true when X is known to be an increasing limit of upper
    semicontinuous functions, the hypothesis under which the duality holds."""

    name: str
    usc_known: bool

    def __call__(self, path: SamplePath, qv: QvPath) -> float: ...


@dataclass(frozen=True)
class ConstantPayoff:
    value: float
    name: str = "constant"
    usc_known: bool = True

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        return self.value


@dataclass(frozen=True)
class TerminalQvPayoff:
    """``<S>_T``."""

    name: str = "qv_T"
    usc_known: bool = False

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        return qv.terminal


@dataclass(frozen=True, eq=False)
class SupIntegralSquaredPayoff:
    """``sup_t ||(F . S)_t||^2`` over the grid."""

    integrand: IntegrandSource
    name: str = "sup_integral_sq"
    usc_known: bool = False

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        values = integrate_simple(resolve_integrand(self.integrand, path), path).values
        return float(np.max(np.sum(values * values, axis=1)))


@dataclass(frozen=True, eq=False)
class TerminalIntegralSquaredPayoff:
    """``||(F . S)_T||^2``."""

    integrand: IntegrandSource
    name: str = "terminal_integral_sq"
    usc_known: bool = False

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        values = integrate_simple(resolve_integrand(self.integrand, path), path).values
        return float(np.sum(values[-1] ** 2))


@dataclass(frozen=True)
class EmptyIndicatorPayoff:
    """Indicator of the empty event."""

    name: str = "empty"
    usc_known: bool = True

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        return 0.0


@dataclass(frozen=True, eq=False)
class SumPayoff:
    parts: tuple[Payoff, ...]

    @property
    def name(self) -> str:
        return " + ".join(part.name for part in self.parts)

    @property
    def usc_known(self) -> bool:
        return all(part.usc_known for part in self.parts)

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        return float(sum(part(path, qv) for part in self.parts))


@dataclass(frozen=True, eq=False)
class ScaledPayoff:
    inner: Payoff
    factor: float

    def __post_init__(self) -> None:
        validate_non_negative(self.factor, "factor")

    @property
    def name(self) -> str:
        return f"{self.factor:g}*{self.inner.name}"

    @property
    def usc_known(self) -> bool:
        return self.inner.usc_known

    def __call__(self, path: SamplePath, qv: QvPath) -> float:
        return self.factor * self.inner(path, qv)


_INTEGRAND_PAYOFFS: dict[str, Callable[[IntegrandSource], Payoff]] = {
    "sup_integral_sq": SupIntegralSquaredPayoff,
    "terminal_integral_sq": TerminalIntegralSquaredPayoff,
}


def payoff_from_name(
    name: str, integrand: IntegrandSource | None = None, value: float = 1.0
) -> Payoff:
    """Built-in payoff by name: ``constant``, ``qv_T``, ``sup_integral_sq``,
    ``terminal_integral_sq`` or ``empty``.

    Raises:
        ConfigError: If the name is unknown or an integrand payoff lacks its integrand.
    """
    if name == "constant":
        return ConstantPayoff(value)
    if name in ("qv_T", "terminal_qv"):
        return TerminalQvPayoff()
    if name == "empty":
        return EmptyIndicatorPayoff()
    if name in _INTEGRAND_PAYOFFS:
        if integrand is None:
            raise ConfigError("payoff", f"{name} needs an integrand")
        return _INTEGRAND_PAYOFFS[name](integrand)
    raise ConfigError("payoff", f"unknown payoff '{name}'")
