"""Second-order hedging: the weak Ito isometry, BDG strategies and their verification."""

from .bdg import BdgStrategy, bdg_strategy, bdg_strategy_vector, capital_core, refining_stops
from .ito import ito_decomposition_residual, pathwise_bdg_check, tilde_integrand
from .payoffs import (
    ConstantPayoff,
    EmptyIndicatorPayoff,
    Payoff,
    ScaledPayoff,
    SumPayoff,
    SupIntegralSquaredPayoff,
    TerminalIntegralSquaredPayoff,
    TerminalQvPayoff,
    payoff_from_name,
)
from .strategies import (
    BdgStrategyRule,
    FixedStrategy,
    ScaledStrategy,
    Strategy,
    SumStrategy,
    ZeroStrategy,
    describe_integrand,
    total_strategy,
    wealth,
)
from .superhedge import PathVerdict, SuperhedgeReport, SuperhedgeSettings, verify_superhedge

__all__ = [
    "BdgStrategy",
    "BdgStrategyRule",
    "ConstantPayoff",
    "EmptyIndicatorPayoff",
    "FixedStrategy",
    "PathVerdict",
    "Payoff",
    "ScaledPayoff",
    "ScaledStrategy",
    "Strategy",
    "SumPayoff",
    "SumStrategy",
    "SupIntegralSquaredPayoff",
    "SuperhedgeReport",
    "SuperhedgeSettings",
    "TerminalIntegralSquaredPayoff",
    "TerminalQvPayoff",
    "ZeroStrategy",
    "bdg_strategy",
    "bdg_strategy_vector",
    "capital_core",
    "describe_integrand",
    "ito_decomposition_residual",
    "pathwise_bdg_check",
    "refining_stops",
    "tilde_integrand",
    "total_strategy",
    "verify_superhedge",
    "wealth",
]
