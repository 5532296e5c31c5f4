"""Tests for ensemble samplers and the membership diagnostic."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pathcalc.core.common.exceptions import MeasureTagError
from pathcalc.core.common.observability import InMemoryMetricsProvider
from pathcalc.core.common.validation import ValidationError
from pathcalc.core.paths import (
    BrownianLaw,
    PathEnsemble,
    PredictionSetSpec,
    SamplePath,
    TimeChangedBrownianLaw,
    XiSettings,
    check_xi_c,
    deterministic_ensemble,
    holder_constant,
    parse_measure_tag,
    quadratic_variation,
    realized_variance,
    sample_ensemble,
    uniform_grid,
)
from pathcalc.core.paths.sampling import RATE_CLOCKS


class TestUniformGrid:
    """Tests for uniform_grid."""

    def test_points(self) -> None:
        """n steps give n + 1 equally spaced points."""
        assert_allclose(uniform_grid(1.0, 4), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_rejects_zero_steps(self) -> None:
        """At least one step is required."""
        with pytest.raises(ValidationError):
            uniform_grid(1.0, 0)


class TestParseMeasureTag:
    """Tests for measure tag parsing."""

    @pytest.mark.parametrize("tag", ["bm(0.5)", "bm:0.5", " bm( 0.5 ) "])
    def test_brownian_forms(self, tag: str) -> None:
        """Call and colon forms are equivalent."""
        assert parse_measure_tag(tag) == BrownianLaw(0.5)

    @pytest.mark.parametrize("tag", ["time_changed_bm(ramp,1.0)", "tcbm:ramp:1.0"])
    def test_time_changed_forms(self, tag: str) -> None:
        """Both spellings of the time-changed law parse."""
        assert parse_measure_tag(tag) == TimeChangedBrownianLaw("ramp", 1.0)

    @pytest.mark.parametrize("tag", ["gbm(1)", "bm(a)", "bm(-1)", "bm(1,2)", "tcbm:wave:1"])
    def test_rejects(self, tag: str) -> None:
        """Unknown laws and bad arguments raise MeasureTagError."""
        with pytest.raises(MeasureTagError):
            parse_measure_tag(tag)

    def test_deterministic_needs_paths(self) -> None:
        """The deterministic law cannot be built from a tag."""
        with pytest.raises(MeasureTagError, match="explicit paths"):
            parse_measure_tag("deterministic")

    def test_tags_round_trip(self) -> None:
        """A law's tag parses back to the same law."""
        for law in (BrownianLaw(0.25), TimeChangedBrownianLaw("sine", 2.0)):
            assert parse_measure_tag(law.tag) == law


class TestSampleEnsemble:
    """Tests for seeded ensembles."""

    def test_same_seed_same_bits(self, small_grid: np.ndarray) -> None:
        """Identical arguments regenerate identical paths."""
        first = sample_ensemble("bm(1)", small_grid, 5, seed=3)
        second = sample_ensemble("bm(1)", small_grid, 5, seed=3)

        assert_array_equal(first.values_array(), second.values_array())

    def test_access_order_irrelevant(self, small_grid: np.ndarray) -> None:
        """Path i does not depend on which paths were generated before."""
        ensemble = sample_ensemble("bm(1)", small_grid, 5, seed=3)

        late = ensemble[4].values
        early = sample_ensemble("bm(1)", small_grid, 5, seed=3)[4].values

        assert_array_equal(late, early)

    def test_different_seeds_differ(self, small_grid: np.ndarray) -> None:
        """Different seeds give different paths."""
        a = sample_ensemble("bm(1)", small_grid, 1, seed=1)[0].values
        b = sample_ensemble("bm(1)", small_grid, 1, seed=2)[0].values

        assert not np.array_equal(a, b)

    def test_offset_and_dimension(self, small_grid: np.ndarray) -> None:
        """Paths start at the offset in every coordinate."""
        ensemble = sample_ensemble("bm(1)", small_grid, 3, seed=0, dim=2, offset=5.0)

        assert ensemble.values_array().shape == (3, small_grid.size, 2)
        assert_array_equal(ensemble[1].values[0], [5.0, 5.0])

    def test_rate_above_bound_rejected(self, small_grid: np.ndarray) -> None:
        """Laws whose QV rate exceeds the prediction set bound are refused."""
        with pytest.raises(MeasureTagError, match="exceeds bound"):
            sample_ensemble("bm(1)", small_grid, 3, seed=0, spec=PredictionSetSpec(0.5))

    def test_rate_within_bound_accepted(self, small_grid: np.ndarray) -> None:
        """bm(sqrt(c)) sits exactly on the bound."""
        ensemble = sample_ensemble("bm(0.5)", small_grid, 3, seed=0, spec=PredictionSetSpec(0.25))

        assert ensemble.measure_tag == "bm(0.5)"

    def test_brownian_variance(self) -> None:
        """Realized variance of bm(vol) is close to vol^2 T."""
        ensemble = sample_ensemble("bm(0.5)", uniform_grid(2.0, 2048), 10, seed=5)

        terminal = np.mean([realized_variance(path).terminal for path in ensemble])

        assert terminal == pytest.approx(0.5, rel=0.05)

    def test_time_changed_variance(self) -> None:
        """The ramp clock runs at half speed on average."""
        ensemble = sample_ensemble("time_changed_bm(ramp,1)", uniform_grid(1.0, 2048), 10, seed=5)

        terminal = np.mean([realized_variance(path).terminal for path in ensemble])

        assert terminal == pytest.approx(0.5, rel=0.05)


class TestRateClocks:
    """Tests for the time-change clocks."""

    @pytest.mark.parametrize("shape", ["const", "ramp", "sine"])
    def test_clock_slope_at_most_one(self, shape: str) -> None:
        """Every clock starts at 0 and grows with slope in [0, 1]."""
        t = np.linspace(0.0, 2.0, 2001)

        clock = RATE_CLOCKS[shape](t, 2.0)
        slopes = np.diff(clock) / np.diff(t)

        assert clock[0] == 0.0
        assert np.all(slopes >= -1e-12)
        assert np.all(slopes <= 1.0 + 1e-12)

    def test_unknown_shape(self) -> None:
        """Only the listed clocks are accepted."""
        with pytest.raises(ValidationError):
            TimeChangedBrownianLaw("square", 1.0)


class TestPathEnsemble:
    """Tests for PathEnsemble access."""

    def test_indexing(self, bm_ensemble: PathEnsemble) -> None:
        """Negative indices wrap and out-of-range indices raise."""
        assert_array_equal(bm_ensemble[-1].values, bm_ensemble[19].values)
        with pytest.raises(IndexError):
            _ = bm_ensemble[20]

    def test_lazy_and_cached_agree(self, small_grid: np.ndarray) -> None:
        """Caching does not change the paths."""
        lazy = sample_ensemble("bm(1)", small_grid, 4, seed=9)
        cached = lazy.cached()

        assert cached[2] is cached[2]
        assert_array_equal(lazy[2].values, cached[2].values)
        assert len(cached.paths) == 4

    def test_deterministic_ensemble(self, tent_path: SamplePath) -> None:
        """Explicit paths are returned as given."""
        ensemble = deterministic_ensemble([tent_path, tent_path.stopped_at(1)])

        assert len(ensemble) == 2
        assert ensemble.measure_tag == "deterministic"
        assert_array_equal(ensemble[1].scalar, [0.0, 1.0, 1.0])

    def test_deterministic_grids_must_match(self, tent_path: SamplePath) -> None:
        """Paths on different grids cannot form an ensemble."""
        other = SamplePath(np.array([0.0, 1.0]), np.array([0.0, 1.0]))

        with pytest.raises(ValidationError, match="share grid"):
            deterministic_ensemble([tent_path, other])


class TestMembershipDiagnostic:
    """Tests for check_xi_c."""

    def test_brownian_path_not_rejected(self) -> None:
        """A bm(1) path is not flagged against slope 1."""
        path = sample_ensemble("bm(1)", uniform_grid(1.0, 4096), 1, seed=21)[0]
        qv = quadratic_variation(path).qv

        report = check_xi_c(path, qv, PredictionSetSpec(1.0))

        assert report.verdict in ("true", "indeterminate")
        assert report.reasons == ()

    def test_fast_path_rejected(self) -> None:
        """A bm(1) path has grid steps far too large for slope 0.05."""
        path = sample_ensemble("bm(1)", uniform_grid(1.0, 4096), 1, seed=21)[0]
        qv = quadratic_variation(path).qv

        report = check_xi_c(path, qv, PredictionSetSpec(0.05))

        assert report.verdict == "false"
        assert report.member is False
        assert report.max_step_ratio > report.step_threshold

    def test_unresolved_is_indeterminate(self, tent_path: SamplePath) -> None:
        """Without a converged QV search the verdict is indeterminate."""
        qv = quadratic_variation(tent_path).qv

        report = check_xi_c(tent_path, qv, PredictionSetSpec(1.0))

        assert report.verdict == "indeterminate"
        assert report.member is None

    def test_holder_bound(self, tent_path: SamplePath) -> None:
        """A Hoelder constant above the configured bound makes the verdict false."""
        qv = quadratic_variation(tent_path).qv

        report = check_xi_c(tent_path, qv, PredictionSetSpec(1.0), XiSettings(holder_bound=0.1))

        assert report.verdict == "false"
        assert "Hoelder" in report.reasons[0]

    def test_violation_recorded(
        self, tent_path: SamplePath, observability: InMemoryMetricsProvider
    ) -> None:
        """False verdicts are reported to the observability hooks."""
        qv = quadratic_variation(tent_path).qv

        check_xi_c(tent_path, qv, PredictionSetSpec(0.01))

        assert observability.total("pathcalc.violations") == 1.0

    def test_holder_constant_of_line(self) -> None:
        """For w(t) = t the largest ratio is taken over the whole horizon."""
        times = uniform_grid(1.0, 64)

        assert holder_constant(SamplePath(times, times), 0.4) == pytest.approx(1.0)
