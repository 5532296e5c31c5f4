"""Tests for the CSV and JSON file codecs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pathcalc.core.common.exceptions import ConfigError
from pathcalc.core.common.statistics import mean_estimate
from pathcalc.core.hedging import (
    BdgStrategyRule,
    FixedStrategy,
    ScaledStrategy,
    SupIntegralSquaredPayoff,
    ZeroStrategy,
)
from pathcalc.core.integration import RuleIntegrand, SimpleIntegrand
from pathcalc.core.outer import certify_sup_integral_sq, verify_certificate
from pathcalc.core.paths import PathEnsemble, SamplePath, deterministic_ensemble
from pathcalc.infrastructure.files import (
    SCHEMA,
    PathcalcJSONEncoder,
    decode_functional,
    decode_integrand,
    decode_sde_spec,
    decode_strategy,
    dumps,
    read_certificate,
    read_document,
    read_ensemble,
    read_integrand,
    read_path,
    read_sde_spec,
    write_certificate,
    write_document,
    write_ensemble,
    write_path,
    write_records,
    write_table,
)


class TestPathFiles:
    """Tests for path and ensemble CSV files."""

    def test_path_is_reproduced_exactly(self, tmp_path: Path, bm_path: SamplePath) -> None:
        """Seventeen significant digits reproduce the arrays bit for bit."""
        target = write_path(tmp_path / "w.csv", bm_path)

        restored = read_path(target)

        assert target.read_text().splitlines()[0] == "t,v1"
        assert_array_equal(restored.times, bm_path.times)
        assert_array_equal(restored.values, bm_path.values)

    def test_ensemble_file(self, tmp_path: Path, bm_ensemble: PathEnsemble) -> None:
        """Ensembles are stored path after path behind a path_id column."""
        paths = [bm_ensemble[i] for i in range(3)]
        target = write_ensemble(tmp_path / "out" / "ensemble.csv", paths)

        restored = read_ensemble(target)

        assert target.read_text().splitlines()[0] == "path_id,t,v1"
        assert len(restored) == 3
        assert_array_equal(restored[2].values, paths[2].values)

    def test_single_path_as_ensemble(self, tmp_path: Path, tent_path: SamplePath) -> None:
        """A path file reads as a one-path ensemble."""
        target = write_path(tmp_path / "tent.csv", tent_path)

        restored = read_ensemble(target)

        assert len(restored) == 1
        assert_array_equal(restored[0].scalar, [0.0, 1.0, 0.0])

    def test_vector_path(self, tmp_path: Path) -> None:
        """Columns v1..vd hold the coordinates."""
        path = SamplePath(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [3.0, 4.0]]))

        target = write_path(tmp_path / "v.csv", path)

        assert target.read_text().splitlines()[0] == "t,v1,v2"
        assert read_path(target).dim == 2

    def test_missing_file(self, tmp_path: Path) -> None:
        """Missing files are configuration errors."""
        with pytest.raises(ConfigError, match="no such file"):
            read_path(tmp_path / "absent.csv")

    def test_bad_header(self, tmp_path: Path) -> None:
        """The first column must be t (or path_id, t for ensembles)."""
        target = tmp_path / "bad.csv"
        target.write_text("time,v1\n0,0\n1,1\n")

        with pytest.raises(ConfigError, match="expected header"):
            read_path(target)
        with pytest.raises(ConfigError, match="expected header"):
            read_ensemble(target)

    def test_column_count(self, tmp_path: Path) -> None:
        """Rows must match the header."""
        target = tmp_path / "short.csv"
        target.write_text("t,v1,v2\n0,0\n1,1\n")

        with pytest.raises(ConfigError, match="columns"):
            read_path(target)

    def test_mixed_dimensions(self, tmp_path: Path, tent_path: SamplePath) -> None:
        """Ensemble paths share a dimension."""
        other = SamplePath(tent_path.times, np.zeros((3, 2)))

        with pytest.raises(ValueError, match="dimension"):
            write_ensemble(tmp_path / "e.csv", [tent_path, other])


class TestTables:
    """Tests for result tables."""

    def test_records(self, tmp_path: Path) -> None:
        """Dict rows become columns in first-row order."""
        target = write_records(
            tmp_path / "qv.csv", [{"m": 0, "qv": 0.5}, {"m": 1, "qv": 0.75}]
        )

        lines = target.read_text().splitlines()
        assert lines[0] == "m,qv"
        assert lines[2] == "1,0.75"

    def test_table_shape(self, tmp_path: Path) -> None:
        """Rows must have one value per column."""
        with pytest.raises(ValueError, match="does not match"):
            write_table(tmp_path / "t.csv", ["a", "b"], [[1.0, 2.0, 3.0]])

    def test_no_records(self, tmp_path: Path) -> None:
        """Empty record lists are refused."""
        with pytest.raises(ValueError):
            write_records(tmp_path / "t.csv", [])


class TestDocuments:
    """Tests for JSON documents."""

    def test_dumps_is_canonical(self) -> None:
        """Keys are sorted and numpy values are plain JSON."""
        text = dumps({"b": np.float64(0.5), "a": np.arange(2)})

        assert text == '{\n  "a": [\n    0,\n    1\n  ],\n  "b": 0.5\n}\n'

    def test_encoder_handles_records(self, tmp_path: Path) -> None:
        """Dataclasses and paths are encoded."""
        text = json.dumps(
            {"estimate": mean_estimate([1.0, 3.0]), "where": tmp_path}, cls=PathcalcJSONEncoder
        )

        data = json.loads(text)
        assert data["estimate"]["mean"] == 2.0
        assert data["where"] == str(tmp_path)

    def test_schema_added(self, tmp_path: Path) -> None:
        """Written documents carry the schema."""
        target = write_document(tmp_path / "doc.json", {"x": 1})

        assert read_document(target) == {"schema": SCHEMA, "x": 1}

    @pytest.mark.parametrize(
        ("content", "message"),
        [
            ("{not json", "not valid JSON"),
            ("[1, 2]", "JSON object"),
            ('{"schema": "other/2"}', "unsupported schema"),
        ],
    )
    def test_rejects(self, tmp_path: Path, content: str, message: str) -> None:
        """Malformed documents are configuration errors."""
        target = tmp_path / "doc.json"
        target.write_text(content)

        with pytest.raises(ConfigError, match=message):
            read_document(target)

    def test_missing_document(self, tmp_path: Path) -> None:
        """The error names the expected document."""
        with pytest.raises(ConfigError, match="'integrand'"):
            read_integrand(tmp_path / "absent.json")


class TestIntegrandSpecs:
    """Tests for integrand and functional specs."""

    def test_stop_time_integrand(self, tent_path: SamplePath) -> None:
        """Stop times resolve on the given grid."""
        F = decode_integrand({"stop_times": [0.0, 0.5], "coeffs": [1.0, -1.0]}, tent_path.times)

        assert isinstance(F, SimpleIntegrand)
        assert_array_equal(F.stops, [0, 1, 2])

    def test_stop_time_integrand_needs_grid(self) -> None:
        """Without a grid the stops cannot be placed."""
        with pytest.raises(ConfigError, match="need a grid"):
            decode_integrand({"stop_times": [0.0], "coeffs": [1.0]})

    def test_crossing_rule(self) -> None:
        """Crossing rules resolve per path."""
        F = decode_integrand({"rule": "crossing", "epsilon": 0.5, "coefficient": [[2.0]]})

        assert isinstance(F, RuleIntegrand)
        assert F.name == "crossing(0.5)"

    def test_deterministic_rule_with_functional(self) -> None:
        """Coefficients may be functional specs."""
        F = decode_integrand(
            {"rule": "deterministic", "stop_times": [0.5], "coefficient": {"functional": "path"}}
        )

        assert isinstance(F, RuleIntegrand)
        assert F.name == "deterministic"

    @pytest.mark.parametrize(
        "spec", [{"rule": "crossing"}, {"rule": "crossing", "epsilon": -1}, {"rule": "hitting"}]
    )
    def test_bad_rules(self, spec: dict) -> None:
        """Unknown rules and nonpositive thresholds are rejected."""
        with pytest.raises(ConfigError):
            decode_integrand(spec)

    def test_functionals(self, tent_path: SamplePath) -> None:
        """Constant, time, path and step functionals."""
        constant = decode_functional({"functional": "constant", "value": [[2.0]]})
        time = decode_functional({"functional": "time", "scale": 3.0})
        state = decode_functional({"functional": "path", "scale": 2.0})
        step = decode_functional({"stop_times": [0.0, 0.5], "coeffs": [1.0, 2.0]})

        assert_allclose(constant.on_grid(tent_path)[:, 0, 0], [2.0, 2.0, 2.0])
        assert_allclose(time.on_grid(tent_path)[:, 0, 0], [0.0, 1.5, 3.0])
        assert_allclose(state.on_grid(tent_path)[:, 0, 0], [0.0, 2.0, 0.0])
        assert_allclose(step.on_grid(tent_path)[:, 0, 0], [1.0, 2.0, 2.0])
        assert time.lipschitz_in_time == 3.0

    def test_unknown_functional(self) -> None:
        """Unknown functional kinds are rejected."""
        with pytest.raises(ConfigError, match="unknown functional"):
            decode_functional({"functional": "random"})

    def test_step_needs_matching_lengths(self) -> None:
        """One coefficient per stop time."""
        with pytest.raises(ConfigError, match="one coefficient per stop time"):
            decode_functional({"stop_times": [0.0, 0.5], "coeffs": [1.0]})


class TestCertificateFiles:
    """Tests for certificate documents."""

    @pytest.fixture
    def unit(self, tent_path: SamplePath) -> SimpleIntegrand:
        """The integrand 1 on (0, 1]."""
        return SimpleIntegrand.constant(tent_path.times, 1.0)

    def test_round_trip_verifies(
        self, tmp_path: Path, unit: SimpleIntegrand, tent_path: SamplePath
    ) -> None:
        """A written certificate reads back and still superhedges."""
        ensemble = deterministic_ensemble([tent_path])
        cert = certify_sup_integral_sq(unit, ensemble, m=0)

        target = write_certificate(tmp_path / "cert.json", cert)
        restored = read_certificate(target, tent_path.times)
        _, report = verify_certificate(restored, ensemble, SupIntegralSquaredPayoff(unit))

        assert restored.lam == cert.lam
        assert restored.target == "sup_integral_sq"
        assert restored.verified_on is None
        assert isinstance(restored.strategies[-1], BdgStrategyRule)
        assert restored.strategies[-1].level is None
        assert report.passed
        assert json.loads(target.read_text())["certificate"]["verified_on"]["passed"] is True

    def test_strategy_kinds(self, unit: SimpleIntegrand, tent_path: SamplePath) -> None:
        """Every strategy kind rebuilds from its spec."""
        spec = ScaledStrategy(FixedStrategy(unit, unit), 2.0).to_spec()

        strategy = decode_strategy(spec, tent_path.times)

        assert isinstance(strategy, ScaledStrategy)
        assert isinstance(strategy.inner, FixedStrategy)
        assert isinstance(decode_strategy({"kind": "zero"}, tent_path.times), ZeroStrategy)

    def test_rule_strategies_are_not_rebuildable(self, tent_path: SamplePath) -> None:
        """Strategies on per-path rules only record the rule name."""
        spec = {"kind": "bdg", "level": 0, "integrand": {"rule": "crossing(0.5)"}}

        with pytest.raises(ConfigError, match="not rebuildable"):
            decode_strategy(spec, tent_path.times)

    def test_unknown_kind(self, tent_path: SamplePath) -> None:
        """Unknown strategy kinds are rejected."""
        with pytest.raises(ConfigError, match="unknown strategy kind"):
            decode_strategy({"kind": "delta"}, tent_path.times)

    def test_document_without_certificate(self, tmp_path: Path, tent_path: SamplePath) -> None:
        """Documents must hold a certificate object."""
        target = write_document(tmp_path / "c.json", {"other": 1})

        with pytest.raises(ConfigError, match="no certificate"):
            read_certificate(target, tent_path.times)


class TestSdeSpecFiles:
    """Tests for SDE spec documents."""

    def test_linear_diffusion(self, tmp_path: Path, small_grid: np.ndarray) -> None:
        """A geometric Brownian motion spec."""
        target = write_document(
            tmp_path / "gbm.json",
            {"x0": 1.0, "diffusion": {"kind": "linear", "sigma0": 0.5}, "L": 0.5, "name": "gbm"},
        )

        spec = read_sde_spec(target, small_grid)

        assert spec.d_K == 1
        assert spec.d_H == 1
        assert spec.name == "gbm"
        assert_allclose(spec.diffusion_at(0.0, np.array([2.0])), [[1.0]])

    def test_affine_drift_constant_diffusion(self, small_grid: np.ndarray) -> None:
        """Mean reversion with a constant noise matrix."""
        spec = decode_sde_spec(
            {
                "x0": [0.0],
                "drift": {"kind": "affine", "a": 2.0},
                "diffusion": {"kind": "constant", "matrix": [[0.1, 0.2]]},
                "L": 1.0,
            },
            small_grid,
        )

        assert spec.d_H == 2
        assert_allclose(spec.drift_at(0.0, np.array([0.5])), [1.5])

    def test_missing_field(self, small_grid: np.ndarray) -> None:
        """Required fields are named in the error."""
        with pytest.raises(ConfigError, match="missing field 'L'"):
            decode_sde_spec({"x0": 1.0, "diffusion": {"kind": "linear", "sigma0": 1.0}}, small_grid)

    @pytest.mark.parametrize(
        "spec",
        [
            {"x0": 1.0, "drift": {"kind": "cubic"}, "diffusion": {"kind": "linear"}, "L": 1.0},
            {"x0": 1.0, "diffusion": {"kind": "jump"}, "L": 1.0},
        ],
    )
    def test_unknown_kinds(self, small_grid: np.ndarray, spec: dict) -> None:
        """Unknown drift and diffusion kinds are rejected."""
        with pytest.raises(ConfigError, match="unknown"):
            decode_sde_spec(spec, small_grid)

    @pytest.mark.parametrize(
        ("spec", "message"),
        [
            ({"x0": 1.0, "diffusion": {"kind": "linear"}, "L": 1.0}, "missing field 'sigma0'"),
            (
                {"x0": 1.0, "drift": {"kind": "constant"}, "diffusion": {"kind": "jump"}, "L": 1.0},
                "missing field 'value'",
            ),
            ({"x0": 1.0, "drift": {"kind": "affine"}, "diffusion": {}, "L": 1.0}, "'a'"),
            ({"x0": 1.0, "diffusion": {"kind": "constant"}, "L": 1.0}, "'matrix'"),
            ({"x0": 1.0, "diffusion": {"kind": "linear", "sigma0": "fast"}, "L": 1.0}, "malformed"),
            ({"x0": 1.0, "diffusion": "linear", "L": 1.0}, "malformed"),
            ({"x0": "one", "diffusion": {"kind": "linear", "sigma0": 1.0}, "L": 1.0}, "malformed"),
        ],
    )
    def test_malformed_nested_fields(
        self, small_grid: np.ndarray, spec: dict, message: str
    ) -> None:
        """Missing or unreadable nested fields are configuration errors."""
        with pytest.raises(ConfigError, match=message):
            decode_sde_spec(spec, small_grid)
