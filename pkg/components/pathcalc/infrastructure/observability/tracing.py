"""OpenTelemetry backend for the observability hooks.

Only the OpenTelemetry API is required. Without an SDK configured by the host application
the spans are non-recording, which keeps batch runs free of exporter setup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from opentelemetry import trace
from opentelemetry.trace import Status, StatusCode

from pathcalc.core.common.observability import TraceSpan, TracingProvider

_SCALARS = (str, int, float, bool)


@dataclass(frozen=True)
class TracingConfig:
    """Configuration for span export.

    Attributes:
        tracer_name: Instrumentation scope reported with every span
    """

    tracer_name: str = "pathcalc"

    def __post_init__(self) -> None:
        """Validate configuration."""
        if not self.tracer_name:
            raise ValueError("tracer_name must be non-empty string")


class OtelTracingProvider(TracingProvider):
    """TracingProvider that mirrors every TraceSpan into an OpenTelemetry span."""

    def __init__(self, config: TracingConfig | None = None) -> None:
        self.config = config or TracingConfig()
        self._tracer = trace.get_tracer(self.config.tracer_name)
        self._open: dict[int, Any] = {}

    def start_span(self, operation: str) -> TraceSpan:
        """Start a local span and its OpenTelemetry counterpart."""
        span = TraceSpan(operation=operation)
        self._open[id(span)] = self._tracer.start_span(operation)
        return span

    def end_span(self, span: TraceSpan) -> None:
        """Copy attributes and status, then end both spans."""
        span.end()
        otel_span = self._open.pop(id(span), None)
        if otel_span is None:
            return
        for key, value in span.attributes.items():
            if isinstance(value, _SCALARS):
                otel_span.set_attribute(key, value)
        otel_span.set_attribute("duration_ms", span.duration_ms)
        if span.error is not None:
            otel_span.set_status(Status(StatusCode.ERROR, span.error))
        otel_span.end()

    @property
    def open_spans(self) -> int:
        return len(self._open)
