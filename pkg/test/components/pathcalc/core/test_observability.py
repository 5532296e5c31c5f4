"""Tests for observability hooks, reductions and the worker pool."""

import logging

import numpy as np
import pytest
from pathcalc.core.common.observability import (
    InMemoryMetricsProvider,
    MetricType,
    NoOpTracingProvider,
    ObservabilityHooks,
    TraceSpan,
    TracingProvider,
    get_observability,
    init_observability,
    set_observability,
)
from pathcalc.core.common.statistics import mean_estimate, pairwise_sum, value_scale
from pathcalc.core.common.validation import ValidationError
from pathcalc.core.execution import PoolSettings, map_paths


class RecordingTracingProvider(TracingProvider):
    """Tracing provider that keeps every span."""

    def __init__(self) -> None:
        self.spans: list[TraceSpan] = []

    def start_span(self, operation: str) -> TraceSpan:
        span = TraceSpan(operation=operation)
        self.spans.append(span)
        return span

    def end_span(self, span: TraceSpan) -> None:
        span.end()


class TestTraceSpan:
    """Tests for TraceSpan."""

    def test_end_sets_ok(self) -> None:
        """Ending a pending span marks it ok and records its duration."""
        span = TraceSpan(operation="qv")

        span.end()

        assert span.status == "ok"
        assert span.end_time is not None
        assert span.duration_ms >= 0.0

    def test_set_error(self) -> None:
        """Errors end the span with status error."""
        span = TraceSpan(operation="qv")

        span.set_error("boom")

        assert span.status == "error"
        assert span.error == "boom"


class TestObservabilityHooks:
    """Tests for the domain recording methods."""

    def test_qv_metrics(self) -> None:
        """QV levels and results become counters and histograms."""
        metrics = InMemoryMetricsProvider()
        hooks = ObservabilityHooks(metrics_provider=metrics)

        hooks.record_qv_level(3, 40)
        hooks.record_qv_result(True)

        assert metrics.total("pathcalc.qv.levels") == 1.0
        intervals = [s for s in metrics.samples if s.name == "pathcalc.qv.intervals"]
        assert intervals[0].value == 40.0
        assert intervals[0].metric_type == MetricType.HISTOGRAM
        searches = [s for s in metrics.samples if s.name == "pathcalc.qv.searches"]
        assert searches[0].labels == {"converged": "true"}

    def test_picard_gauge(self) -> None:
        """Picard sweeps set a gauge labelled by iteration."""
        metrics = InMemoryMetricsProvider()
        hooks = ObservabilityHooks(metrics_provider=metrics)

        hooks.record_picard_iteration(2, 0.25)

        gauge = [s for s in metrics.samples if s.name == "pathcalc.picard.g"][0]
        assert gauge.value == 0.25
        assert gauge.labels == {"n": "2"}
        assert gauge.metric_type == MetricType.GAUGE

    def test_verification_counts(self) -> None:
        """Verification adds paths and failures."""
        metrics = InMemoryMetricsProvider()
        hooks = ObservabilityHooks(metrics_provider=metrics)

        hooks.record_verification(100, 3)

        assert metrics.total("pathcalc.verify.paths") == 100.0
        assert metrics.total("pathcalc.verify.failures") == 3.0

    def test_experiment_callbacks(self) -> None:
        """Experiment callbacks receive name, status and seconds."""
        hooks = ObservabilityHooks(metrics_provider=InMemoryMetricsProvider())
        seen: list[tuple[str, str, float]] = []
        hooks.on_experiment(lambda *args: seen.append(args))

        hooks.record_experiment("qv", "ok", 1.5)

        assert seen == [("qv", "ok", 1.5)]

    def test_violation_callbacks_and_log(self, caplog: pytest.LogCaptureFixture) -> None:
        """Violations reach callbacks and are logged as warnings."""
        hooks = ObservabilityHooks(logger=logging.getLogger("pathcalc.test"))
        seen: list[tuple[str, str]] = []
        hooks.on_violation(lambda *args: seen.append(args))

        with caplog.at_level(logging.WARNING, logger="pathcalc.test"):
            hooks.record_violation("superhedge", "2 paths failed")

        assert seen == [("superhedge", "2 paths failed")]
        assert "Property violation in superhedge" in caplog.text

    def test_span_records_attributes(self) -> None:
        """Spans carry their attributes and end ok."""
        tracing = RecordingTracingProvider()
        hooks = ObservabilityHooks(tracing_provider=tracing)

        with hooks.span("solve_sde", paths=10) as span:
            assert span.attributes == {"paths": 10}

        assert tracing.spans[0].status == "ok"

    def test_span_records_error(self) -> None:
        """Exceptions mark the span as errored and propagate."""
        tracing = RecordingTracingProvider()
        hooks = ObservabilityHooks(tracing_provider=tracing)

        with pytest.raises(RuntimeError), hooks.span("qv"):
            raise RuntimeError("diverged")

        assert tracing.spans[0].status == "error"
        assert tracing.spans[0].error == "diverged"


class TestGlobalObservability:
    """Tests for the global registry."""

    def test_init_sets_global(self) -> None:
        """init_observability installs the new hooks."""
        metrics = InMemoryMetricsProvider()

        hooks = init_observability(metrics_provider=metrics)

        assert get_observability() is hooks
        assert hooks.metrics is metrics
        assert isinstance(hooks.tracing, NoOpTracingProvider)

    def test_set_global(self) -> None:
        """set_observability replaces the global hooks."""
        hooks = ObservabilityHooks()

        set_observability(hooks)

        assert get_observability() is hooks


class TestStatistics:
    """Tests for deterministic reductions."""

    def test_mean_estimate(self) -> None:
        """Mean and standard error of a small sample."""
        estimate = mean_estimate([1.0, 2.0, 3.0, 4.0])

        assert estimate.mean == 2.5
        assert estimate.standard_error == pytest.approx(np.sqrt(5.0 / 3.0 / 4.0))
        assert estimate.samples == 4

    def test_mean_estimate_degenerate(self) -> None:
        """Empty and single samples have zero standard error."""
        assert mean_estimate([]).samples == 0
        assert mean_estimate([7.0]).standard_error == 0.0

    def test_within(self) -> None:
        """within compares against n_se standard errors."""
        estimate = mean_estimate([1.0, 2.0, 3.0, 4.0])

        assert estimate.within(2.5 + 2.0 * estimate.standard_error)
        assert not estimate.within(2.5 + 4.0 * estimate.standard_error)

    def test_pairwise_sum_and_scale(self) -> None:
        """pairwise_sum adds in order and value_scale is at least one."""
        assert pairwise_sum([0.5, 0.25, 0.25]) == 1.0
        assert value_scale([0.1], []) == 1.0
        assert value_scale([0.1, -4.0]) == 4.0


def _square(x: int) -> int:
    return x * x


class TestWorkerPool:
    """Tests for map_paths."""

    def test_inline_order(self) -> None:
        """Inline execution keeps input order."""
        assert map_paths(_square, range(5)) == [0, 1, 4, 9, 16]

    def test_threaded_order(self) -> None:
        """Parallel backends return results in input order."""
        settings = PoolSettings(n_jobs=2, backend="threading")

        assert map_paths(_square, range(20), settings) == [i * i for i in range(20)]

    @pytest.mark.parametrize(
        ("kwargs", "field"),
        [
            ({"n_jobs": 0}, "n_jobs"),
            ({"backend": "dask"}, "backend"),
            ({"batch_size": 0}, "batch_size"),
            ({"batch_size": "many"}, "batch_size"),
        ],
    )
    def test_settings_validation(self, kwargs: dict[str, object], field: str) -> None:
        """Zero workers, unknown backends and bad batch sizes are validation errors."""
        with pytest.raises(ValidationError) as excinfo:
            PoolSettings(**kwargs)

        assert excinfo.value.field == field
