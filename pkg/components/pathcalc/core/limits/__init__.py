"""Limits of simple integrals, Lipschitz compositions and Cauchy subsequences."""

from .approximation import (
    LimitApproximation,
    check_schedule,
    default_schedule,
    integrate_h2,
    integrate_hinf,
)
from .cauchy import CauchyLimit, cauchy_limit, sup_distance
from .compose import compose_lipschitz, probe_lipschitz, riesz_identify

__all__ = [
    "CauchyLimit",
    "LimitApproximation",
    "cauchy_limit",
    "check_schedule",
    "compose_lipschitz",
    "default_schedule",
    "integrate_h2",
    "integrate_hinf",
    "probe_lipschitz",
    "riesz_identify",
    "sup_distance",
]
