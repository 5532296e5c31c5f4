"""Test configuration and fixtures."""

from collections.abc import Iterator

import numpy as np
import pytest
from pathcalc.core.common.observability import (
    InMemoryMetricsProvider,
    ObservabilityHooks,
    get_observability,
    set_observability,
)
from pathcalc.core.paths import PathEnsemble, SamplePath, sample_ensemble, uniform_grid


@pytest.fixture(autouse=True)
def observability() -> Iterator[InMemoryMetricsProvider]:
    """Give every test fresh hooks backed by an in-memory metrics provider."""
    previous = get_observability()
    metrics = InMemoryMetricsProvider()
    set_observability(ObservabilityHooks(metrics_provider=metrics))
    yield metrics
    set_observability(previous)


@pytest.fixture
def tent_path() -> SamplePath:
    """The path 0, 1, 0 on the grid 0, 0.5, 1."""
    return SamplePath(np.array([0.0, 0.5, 1.0]), np.array([0.0, 1.0, 0.0]))


@pytest.fixture
def small_grid() -> np.ndarray:
    """A 256-step grid on [0, 1]."""
    return uniform_grid(1.0, 256)


@pytest.fixture
def bm_ensemble(small_grid: np.ndarray) -> PathEnsemble:
    """Twenty Brownian paths on the small grid, cached in memory."""
    return sample_ensemble("bm(1)", small_grid, 20, seed=7).cached()


@pytest.fixture
def bm_path(bm_ensemble: PathEnsemble) -> SamplePath:
    """One Brownian path from the ensemble."""
    return bm_ensemble[0]
