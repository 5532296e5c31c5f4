"""Outer-measure bounds: integrand norms, certificates and duality intervals."""

from .bounds import (
    BoundInterval,
    IsometryGap,
    LowerBound,
    duality_gap,
    empirical_cauchy_schwarz,
    mc_lower_bound,
    payoff_values,
    weak_isometry_gap,
)
from .certificates import (
    HedgingCertificate,
    VerificationRecord,
    certify_sup_integral_sq,
    combine_certificates,
    scale_certificate,
    strategy_free_certificate,
    verify_certificate,
)
from .norms import (
    NormEstimate,
    integrand_difference,
    norm_h2,
    norm_h_inf,
    norms_squared_on_grid,
)

__all__ = [
    "BoundInterval",
    "HedgingCertificate",
    "IsometryGap",
    "LowerBound",
    "NormEstimate",
    "VerificationRecord",
    "certify_sup_integral_sq",
    "combine_certificates",
    "duality_gap",
    "empirical_cauchy_schwarz",
    "integrand_difference",
    "mc_lower_bound",
    "norm_h2",
    "norm_h_inf",
    "norms_squared_on_grid",
    "payoff_values",
    "scale_certificate",
    "strategy_free_certificate",
    "verify_certificate",
    "weak_isometry_gap",
]
