"""Tests for the Prometheus metrics backend."""

from __future__ import annotations

from pathlib import Path

import pytest
from pathcalc.core.common.observability import ObservabilityHooks
from pathcalc.infrastructure.observability.prometheus import MetricConfig, PrometheusMetrics
from prometheus_client import CollectorRegistry


class TestMetricConfig:
    """Tests for MetricConfig."""

    def test_default_config(self) -> None:
        """Defaults use the pathcalc namespace and a private registry."""
        config = MetricConfig()
        assert config.namespace == "pathcalc"
        assert config.registry is None
        assert config.textfile is None

    @pytest.mark.parametrize("namespace", ["", "my-app", "1run"])
    def test_invalid_namespace(self, namespace: str) -> None:
        """Namespaces must be identifiers."""
        with pytest.raises(ValueError, match="namespace"):
            MetricConfig(namespace=namespace)


class TestPrometheusMetrics:
    """Tests for PrometheusMetrics."""

    def test_counter_with_labels(self) -> None:
        """Dotted names are exported with underscores."""
        metrics = PrometheusMetrics()

        metrics.counter("pathcalc.qv.levels", labels={"level": "3"})
        metrics.counter("pathcalc.qv.levels", labels={"level": "3"})

        value = metrics.registry.get_sample_value("pathcalc_qv_levels_total", {"level": "3"})
        assert value == 2.0

    def test_gauge_and_histogram(self) -> None:
        """Gauges keep the last value and histograms count observations."""
        metrics = PrometheusMetrics()

        metrics.gauge("pathcalc.picard.g", 0.5, labels={"n": "1"})
        metrics.gauge("pathcalc.picard.g", 0.25, labels={"n": "1"})
        metrics.histogram("pathcalc.qv.intervals", 40.0)

        registry = metrics.registry
        assert registry.get_sample_value("pathcalc_picard_g", {"n": "1"}) == 0.25
        assert registry.get_sample_value("pathcalc_qv_intervals_count") == 1.0
        assert registry.get_sample_value("pathcalc_qv_intervals_sum") == 40.0

    def test_custom_namespace_and_registry(self) -> None:
        """The namespace replaces the leading pathcalc; a shared registry is used."""
        registry = CollectorRegistry()
        metrics = PrometheusMetrics(MetricConfig(namespace="batch", registry=registry))

        metrics.counter("pathcalc.experiments", labels={"experiment": "qv", "status": "ok"})

        labels = {"experiment": "qv", "status": "ok"}
        assert registry.get_sample_value("batch_experiments_total", labels) == 1.0

    def test_type_conflict(self) -> None:
        """A name cannot be reused with another collector type."""
        metrics = PrometheusMetrics()
        metrics.counter("pathcalc.verify.paths")

        with pytest.raises(ValueError, match="already registered"):
            metrics.gauge("pathcalc.verify.paths", 1.0)

    def test_hooks_report_through_prometheus(self) -> None:
        """Domain hooks land in the Prometheus registry."""
        metrics = PrometheusMetrics()
        hooks = ObservabilityHooks(metrics_provider=metrics)

        hooks.record_verification(100, 2)
        hooks.record_qv_result(True)

        registry = metrics.registry
        assert registry.get_sample_value("pathcalc_verify_paths_total") == 100.0
        assert registry.get_sample_value("pathcalc_verify_failures_total") == 2.0
        searches = registry.get_sample_value("pathcalc_qv_searches_total", {"converged": "true"})
        assert searches == 1.0

    def test_exposition(self) -> None:
        """The text exposition names every collector."""
        metrics = PrometheusMetrics()
        metrics.counter("pathcalc.picard.iterations")

        assert b"pathcalc_picard_iterations_total" in metrics.exposition()

    def test_flush(self, tmp_path: Path) -> None:
        """flush writes a textfile when one is configured."""
        target = tmp_path / "run.prom"
        metrics = PrometheusMetrics(MetricConfig(textfile=str(target)))
        metrics.counter("pathcalc.experiments", labels={"experiment": "qv", "status": "ok"})

        written = metrics.flush()

        assert written == str(target)
        assert "pathcalc_experiments_total" in target.read_text()

    def test_flush_without_target(self) -> None:
        """Without a textfile nothing is written."""
        assert PrometheusMetrics().flush() is None
