"""Observability instrumentation for pathcalc.

Provides hooks for metrics and tracing around experiments, quadratic variation searches,
Picard iterations and certificate verification. Backends live in
``pathcalc.infrastructure.observability``.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Generator
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import UTC, datetime
from typing import Any


class MetricType:
    """Metric type constants."""

    COUNTER = "counter"
    GAUGE = "gauge"
    HISTOGRAM = "histogram"


@dataclass
class MetricValue:
    """Metric value with metadata."""

    name: str
    value: float
    unit: str = ""
    timestamp: datetime = field(default_factory=lambda: datetime.now(UTC))
    labels: dict[str, str] = field(default_factory=dict)
    metric_type: str = MetricType.COUNTER


@dataclass
class TraceSpan:
    """Trace span for one unit of numerical work."""

    operation: str
    start_time: datetime = field(default_factory=lambda: datetime.now(UTC))
    end_time: datetime | None = None
    duration_ms: float = 0.0
    status: str = "pending"
    attributes: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    def end(self) -> None:
        """Mark span as ended."""
        self.end_time = datetime.now(UTC)
        self.duration_ms = (self.end_time - self.start_time).total_seconds() * 1000
        if self.status == "pending":
            self.status = "ok"

    def set_error(self, error: str) -> None:
        """Mark span as errored."""
        self.error = error
        self.status = "error"
        self.end()


class MetricsProvider(ABC):
    """Abstract base for metrics collection."""

    @abstractmethod
    def counter(self, name: str, value: float = 1.0, labels: dict[str, str] | None = None) -> None:
        """Increment a counter metric."""
        ...

    @abstractmethod
    def gauge(self, name: str, value: float, labels: dict[str, str] | None = None) -> None:
        """Set a gauge metric."""
        ...

    @abstractmethod
    def histogram(
        self,
        name: str,
        value: float,
        unit: str = "",
        labels: dict[str, str] | None = None,
    ) -> None:
        """Observe a histogram sample."""
        ...


class NoOpMetricsProvider(MetricsProvider):
    """No-op metrics provider (default)."""

    def counter(self, name: str, value: float = 1.0, labels: dict[str, str] | None = None) -> None:
        """No-op implementation."""

    def gauge(self, name: str, value: float, labels: dict[str, str] | None = None) -> None:
        """No-op implementation."""

    def histogram(
        self,
        name: str,
        value: float,
        unit: str = "",
        labels: dict[str, str] | None = None,
    ) -> None:
        """No-op implementation."""


class InMemoryMetricsProvider(MetricsProvider):
    """Metrics provider that keeps every sample, used by tests and the selftest report."""

    def __init__(self) -> None:
        self.samples: list[MetricValue] = []

    def counter(self, name: str, value: float = 1.0, labels: dict[str, str] | None = None) -> None:
        """Record a counter increment."""
        self.samples.append(MetricValue(name, value, labels=labels or {}))

    def gauge(self, name: str, value: float, labels: dict[str, str] | None = None) -> None:
        """Record a gauge value."""
        self.samples.append(
            MetricValue(name, value, labels=labels or {}, metric_type=MetricType.GAUGE)
        )

    def histogram(
        self,
        name: str,
        value: float,
        unit: str = "",
        labels: dict[str, str] | None = None,
    ) -> None:
        """Record a histogram sample."""
        self.samples.append(
            MetricValue(name, value, unit, labels=labels or {}, metric_type=MetricType.HISTOGRAM)
        )

    def total(self, name: str) -> float:
        """Sum of all recorded values for a metric name."""
        return sum(sample.value for sample in self.samples if sample.name == name)


class TracingProvider(ABC):
    """Abstract base for tracing backends."""

    @abstractmethod
    def start_span(self, operation: str) -> TraceSpan:
        """Start a new trace span."""
        ...

    @abstractmethod
    def end_span(self, span: TraceSpan) -> None:
        """End a trace span."""
        ...


class NoOpTracingProvider(TracingProvider):
    """No-op tracing provider (default)."""

    def start_span(self, operation: str) -> TraceSpan:
        """Create span but don't export."""
        return TraceSpan(operation=operation)

    def end_span(self, span: TraceSpan) -> None:
        """Close the span locally."""
        span.end()


class ObservabilityHooks:
    """Central registry for observability hooks.

    Numerical code reports domain events here without knowing which backend is active.
    """

    def __init__(
        self,
        metrics_provider: MetricsProvider | None = None,
        tracing_provider: TracingProvider | None = None,
        logger: logging.Logger | None = None,
    ):
        """Initialize observability hooks.

        Args:
            metrics_provider: Metrics implementation (defaults to no-op)
            tracing_provider: Tracing implementation (defaults to no-op)
            logger: Logger instance
        """
        self.metrics = metrics_provider or NoOpMetricsProvider()
        self.tracing = tracing_provider or NoOpTracingProvider()
        self.logger = logger or logging.getLogger("pathcalc.observability")
        self._experiment_hooks: list[Callable[[str, str, float], None]] = []
        self._violation_hooks: list[Callable[[str, str], None]] = []

    # === Metrics ===

    def record_qv_level(self, level: int, intervals: int) -> None:
        """Record one evaluated crossing level."""
        self.metrics.counter("pathcalc.qv.levels", labels={"level": str(level)})
        self.metrics.histogram("pathcalc.qv.intervals", float(intervals))

    def record_qv_result(self, converged: bool) -> None:
        """Record the outcome of one adaptive QV search."""
        self.metrics.counter(
            "pathcalc.qv.searches", labels={"converged": str(converged).lower()}
        )

    def record_picard_iteration(self, n: int, g: float) -> None:
        """Record one Picard sweep over an ensemble."""
        self.metrics.counter("pathcalc.picard.iterations")
        self.metrics.gauge("pathcalc.picard.g", g, labels={"n": str(n)})

    def record_verification(self, paths: int, failures: int) -> None:
        """Record a superhedge verification run."""
        self.metrics.counter("pathcalc.verify.paths", float(paths))
        self.metrics.counter("pathcalc.verify.failures", float(failures))

    def record_experiment(self, experiment: str, status: str, seconds: float) -> None:
        """Record a finished CLI experiment."""
        self.metrics.counter(
            "pathcalc.experiments", labels={"experiment": experiment, "status": status}
        )
        self.metrics.histogram(
            "pathcalc.experiment.seconds", seconds, "s", labels={"experiment": experiment}
        )
        for hook in self._experiment_hooks:
            hook(experiment, status, seconds)

    def record_violation(self, check: str, detail: str) -> None:
        """Record a property violation found by a diagnostic."""
        self.metrics.counter("pathcalc.violations", labels={"check": check})
        for hook in self._violation_hooks:
            hook(check, detail)
        self.logger.warning(f"Property violation in {check}: {detail}")

    # === Tracing ===

    @contextmanager
    def span(self, operation: str, **attributes: Any) -> Generator[TraceSpan, None, None]:
        """Trace a block of work.

        Args:
            operation: Span name
            **attributes: Attributes attached to the span

        Yields:
            The active span
        """
        span = self.tracing.start_span(operation)
        span.attributes.update(attributes)
        try:
            yield span
        except Exception as exc:
            span.set_error(str(exc))
            raise
        finally:
            self.tracing.end_span(span)

    # === Hook Registration ===

    def on_experiment(self, callback: Callable[[str, str, float], None]) -> None:
        """Register callback(experiment, status, seconds)."""
        self._experiment_hooks.append(callback)

    def on_violation(self, callback: Callable[[str, str], None]) -> None:
        """Register callback(check, detail)."""
        self._violation_hooks.append(callback)


_global_observability: ObservabilityHooks | None = None


def get_observability() -> ObservabilityHooks:
    """Get global observability instance."""
    global _global_observability
    if _global_observability is None:
        _global_observability = ObservabilityHooks()
    return _global_observability


def set_observability(hooks: ObservabilityHooks) -> None:
    """Set global observability instance."""
    global _global_observability
    _global_observability = hooks


def init_observability(
    metrics_provider: MetricsProvider | None = None,
    tracing_provider: TracingProvider | None = None,
    logger: logging.Logger | None = None,
) -> ObservabilityHooks:
    """Initialize and set global observability.

    Returns:
        Initialized ObservabilityHooks instance
    """
    hooks = ObservabilityHooks(
        metrics_provider=metrics_provider,
        tracing_provider=tracing_provider,
        logger=logger,
    )
    set_observability(hooks)
    return hooks
