"""Simple integrands and pathwise integrals."""

from .functionals import OperatorPathFunctional
from .integrals import (
    CoercedIntegrand,
    check_driver,
    coerce_to_simple,
    driver_slope,
    fv_energy_bound,
    integrate_fv,
    integrate_simple,
    integrate_stieltjes,
)
from .integrands import (
    CrossingTimesRule,
    DeterministicTimesRule,
    DifferenceIntegrand,
    HittingRule,
    IntegrandRule,
    IntegrandSource,
    RuleIntegrand,
    SimpleIntegrand,
    StoppingRule,
    grid_index_at_or_after,
    resolve_integrand,
)
from .operators import OperatorValue, as_matrix, operator_norm, operator_norms

__all__ = [
    "CoercedIntegrand",
    "CrossingTimesRule",
    "DeterministicTimesRule",
    "DifferenceIntegrand",
    "HittingRule",
    "IntegrandRule",
    "IntegrandSource",
    "OperatorPathFunctional",
    "OperatorValue",
    "RuleIntegrand",
    "SimpleIntegrand",
    "StoppingRule",
    "as_matrix",
    "check_driver",
    "coerce_to_simple",
    "driver_slope",
    "fv_energy_bound",
    "grid_index_at_or_after",
    "integrate_fv",
    "integrate_simple",
    "integrate_stieltjes",
    "operator_norm",
    "operator_norms",
    "resolve_integrand",
]
