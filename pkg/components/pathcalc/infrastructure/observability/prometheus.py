"""Prometheus backend for the observability hooks.

Metric names reported by the numerical bricks use dots (``pathcalc.qv.levels``); they are
exported with underscores. Batch runs have no scrape endpoint, so the registry is written
to a node-exporter textfile at the end of a run.

Example:
    from pathcalc.infrastructure.observability import MetricConfig, PrometheusMetrics

    metrics = PrometheusMetrics(MetricConfig(textfile="run.prom"))
    init_observability(metrics_provider=metrics)
    ...
    metrics.flush()
"""

from __future__ import annotations

from dataclasses import dataclass

from prometheus_client import (
    CollectorRegistry,
    Counter,
    Gauge,
    Histogram,
    generate_latest,
    write_to_textfile,
)

from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import MetricsProvider

logger = StructuredLogger(__name__)

_Metric = Counter | Gauge | Histogram


@dataclass(frozen=True)
class MetricConfig:
    """Configuration for Prometheus metrics.

    Attributes:
        namespace: Prefix replacing the leading ``pathcalc`` of reported names
        registry: Optional CollectorRegistry (a private one if None)
        textfile: Where ``flush`` writes the exposition, or None
    """

    namespace: str = "pathcalc"
    registry: CollectorRegistry | None = None
    textfile: str | None = None

    def __post_init__(self) -> None:
        """Validate configuration."""
        if not self.namespace or not self.namespace.isidentifier():
            raise ValueError("namespace must be a non-empty identifier")


class PrometheusMetrics(MetricsProvider):
    """MetricsProvider that creates Prometheus collectors on first use."""

    def __init__(self, config: MetricConfig | None = None) -> None:
        self.config = config or MetricConfig()
        self.registry = self.config.registry or CollectorRegistry()
        self._collectors: dict[str, _Metric] = {}

    def _name(self, name: str) -> str:
        head, _, rest = name.partition(".")
        if head == "pathcalc":
            head = self.config.namespace
        return "_".join([head, *rest.split(".")]) if rest else head

    def _collector(self, kind: type[_Metric], name: str, labels: dict[str, str]) -> _Metric:
        key = self._name(name)
        collector = self._collectors.get(key)
        if collector is None:
            collector = kind(key, name, sorted(labels), registry=self.registry)
            self._collectors[key] = collector
        elif not isinstance(collector, kind):
            raise ValueError(f"metric {name} already registered as {type(collector).__name__}")
        return collector.labels(**labels) if labels else collector

    def counter(self, name: str, value: float = 1.0, labels: dict[str, str] | None = None) -> None:
        """Increment a Prometheus counter."""
        self._collector(Counter, name, labels or {}).inc(value)

    def gauge(self, name: str, value: float, labels: dict[str, str] | None = None) -> None:
        """Set a Prometheus gauge."""
        self._collector(Gauge, name, labels or {}).set(value)

    def histogram(
        self,
        name: str,
        value: float,
        unit: str = "",
        labels: dict[str, str] | None = None,
    ) -> None:
        """Observe a Prometheus histogram sample."""
        self._collector(Histogram, name, labels or {}).observe(value)

    def exposition(self) -> bytes:
        """Prometheus text exposition of the registry."""
        return generate_latest(self.registry)

    def flush(self, path: str | None = None) -> str | None:
        """Write the registry to ``path`` (default: the configured textfile)."""
        target = path or self.config.textfile
        if target is None:
            return None
        write_to_textfile(target, self.registry)
        logger.info("Metrics written", path=target, collectors=len(self._collectors))
        return target
