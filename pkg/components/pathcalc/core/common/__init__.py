from .exceptions import (
    CertificateError,
    ConfigError,
    DimensionMismatchError,
    GridMismatchError,
    LipschitzViolationError,
    MeasureTagError,
    NotCauchyError,
    PathcalcError,
    ResolutionError,
    SlopeBoundError,
)
from .logging import StructuredLogger, configure_logging, get_logger
from .observability import (
    InMemoryMetricsProvider,
    MetricsProvider,
    MetricType,
    MetricValue,
    ObservabilityHooks,
    TraceSpan,
    TracingProvider,
    get_observability,
    init_observability,
    set_observability,
)
from .statistics import MeanEstimate, mean_estimate, pairwise_sum, value_scale
from .validation import (
    ValidationError,
    validate_finite,
    validate_in_range,
    validate_non_negative,
    validate_nondecreasing_indices,
    validate_one_of,
    validate_positive,
    validate_power_of_two,
    validate_strictly_increasing,
)

__all__ = [
    "CertificateError",
    "ConfigError",
    "DimensionMismatchError",
    "GridMismatchError",
    "InMemoryMetricsProvider",
    "LipschitzViolationError",
    "MeanEstimate",
    "MeasureTagError",
    "MetricType",
    "MetricValue",
    "MetricsProvider",
    "NotCauchyError",
    "ObservabilityHooks",
    "PathcalcError",
    "ResolutionError",
    "SlopeBoundError",
    "StructuredLogger",
    "TraceSpan",
    "TracingProvider",
    "ValidationError",
    "configure_logging",
    "get_logger",
    "get_observability",
    "init_observability",
    "mean_estimate",
    "pairwise_sum",
    "set_observability",
    "validate_finite",
    "validate_in_range",
    "validate_non_negative",
    "validate_nondecreasing_indices",
    "validate_one_of",
    "validate_positive",
    "validate_power_of_two",
    "validate_strictly_increasing",
    "value_scale",
]
