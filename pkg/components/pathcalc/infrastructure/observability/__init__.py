from .prometheus import MetricConfig, PrometheusMetrics
from .tracing import OtelTracingProvider, TracingConfig

__all__ = [
    "MetricConfig",
    "OtelTracingProvider",
    "PrometheusMetrics",
    "TracingConfig",
]
