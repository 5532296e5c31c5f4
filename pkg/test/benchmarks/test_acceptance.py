"""Desk-scale acceptance checks with timings.

Each test runs its workload once through ``benchmark.pedantic`` and then asserts the
oracle. Run with ``pytest -m acceptance test/benchmarks``.
"""

import math
from pathlib import Path
from typing import Any

import numpy as np
import pytest
from pathcalc.cli import main
from pathcalc.core.hedging import (
    SumPayoff,
    SupIntegralSquaredPayoff,
    TerminalQvPayoff,
    ito_decomposition_residual,
    pathwise_bdg_check,
    verify_superhedge,
)
from pathcalc.core.integration import SimpleIntegrand
from pathcalc.core.outer import (
    certify_sup_integral_sq,
    combine_certificates,
    duality_gap,
    norm_h_inf,
    strategy_free_certificate,
    weak_isometry_gap,
)
from pathcalc.core.paths import (
    PredictionSetSpec,
    QvSettings,
    SamplePath,
    quadratic_variation,
    realized_variance,
    sample_ensemble,
    uniform_grid,
)
from pathcalc.core.sde import (
    SdeSpec,
    constant_drift,
    gbm_closed_form,
    linear_diffusion,
    picard_bound,
    picard_constant,
    solve_sde,
    time_driver,
)
from pathcalc.infrastructure.files import write_document

pytestmark = pytest.mark.acceptance

SEED = 20240607
INCREMENT_QV = QvSettings(method="increment")


def _once(benchmark: Any, fn: Any, *args: Any) -> Any:
    return benchmark.pedantic(fn, args=args, rounds=1, iterations=1)


def _random_integrand(
    rng: np.random.Generator, times: np.ndarray, d_K: int, d_H: int  # noqa: N803
) -> SimpleIntegrand:
    last = times.size - 1
    k = int(rng.integers(1, min(8, last) + 1))
    interior = np.sort(rng.choice(np.arange(1, last), size=k - 1, replace=False))
    stops = np.concatenate(([0], interior, [last]))
    return SimpleIntegrand(times, stops, rng.standard_normal((k, d_K, d_H)))


def _random_path(rng: np.random.Generator, times: np.ndarray, dim: int) -> SamplePath:
    steps = rng.standard_normal((times.size - 1, dim)) * np.sqrt(np.diff(times))[:, None]
    return SamplePath(times, np.vstack([np.zeros(dim), np.cumsum(steps, axis=0)]))


@pytest.mark.benchmark(group="acceptance")
def test_doob_inequality_on_random_sequences(benchmark: Any) -> None:
    """No random sequence violates the pathwise Doob inequality."""
    rng = np.random.default_rng(SEED)

    def run() -> int:
        failures = 0
        for _ in range(100_000):
            x = rng.standard_normal(int(rng.integers(1, 513)))
            lhs, rhs = pathwise_bdg_check(x)
            if lhs > rhs + 1e-9 * (1.0 + float(np.max(x * x))):
                failures += 1
        return failures

    assert _once(benchmark, run) == 0


@pytest.mark.benchmark(group="acceptance")
def test_ito_decomposition(benchmark: Any) -> None:
    """Scalar residuals vanish at the stops; matrix residuals are nonnegative."""
    rng = np.random.default_rng(SEED)
    times = uniform_grid(1.0, 32)

    def worst(n_cases: int, dim: int) -> float:
        result = -math.inf if dim == 1 else math.inf
        for _ in range(n_cases):
            path = _random_path(rng, times, dim)
            F = _random_integrand(rng, times, dim, dim)  # noqa: N806
            residual = ito_decomposition_residual(F, path, realized_variance(path)).scalar
            scale = (1.0 + float(np.max(F.coeffs**2))) * (1.0 + float(np.max(path.values**2)))
            if dim == 1:
                result = max(result, float(np.max(np.abs(residual[F.stops]))) / scale)
            else:
                result = min(result, float(np.min(residual)) / scale)
        return result

    scalar, matrix = _once(benchmark, lambda: (worst(10_000, 1), worst(1_000, 2)))

    assert scalar <= 1e-10
    assert matrix >= -1e-10


@pytest.mark.benchmark(group="acceptance")
def test_bdg_certificate_on_prediction_set(benchmark: Any) -> None:
    """The certificate with capital 4 ||F||^2 superhedges on every path."""
    grid = uniform_grid(1.0, 2**12)
    paths = sample_ensemble("bm(1)", grid, 1_000, SEED, spec=PredictionSetSpec(1.0, 1.0))
    F = SimpleIntegrand.from_stop_times(  # noqa: N806
        grid, [0.0, 0.25, 0.5, 0.75], [1.0, -0.5, 0.8, 0.3]
    )
    qvs = QvSettings()

    cert = _once(benchmark, certify_sup_integral_sq, F, paths, qvs)

    assert cert.verified_on is not None
    assert cert.verified_on.passed
    assert cert.verified_on.worst_admissibility >= 0.0
    assert cert.lam == pytest.approx(4.0 * norm_h_inf(F, paths, qvs) ** 2, rel=1e-12)


@pytest.mark.benchmark(group="acceptance")
def test_weak_isometry_under_brownian_motion(benchmark: Any) -> None:
    """mean (F . S)_T^2 and mean (||F||^2 . <S>)_T agree within three standard errors."""
    grid = uniform_grid(1.0, 2**12)
    paths = sample_ensemble("bm(1)", grid, 10_000, SEED)
    F = SimpleIntegrand.from_stop_times(grid, [0.0, 0.3, 0.6], [1.0, -0.5, 0.8])  # noqa: N806

    gap = _once(benchmark, weak_isometry_gap, F, paths, INCREMENT_QV)

    assert gap.within(3.0)


@pytest.mark.benchmark(group="acceptance")
def test_quadratic_variation_of_brownian_motion(benchmark: Any) -> None:
    """Volatility 0.5 gives terminal QV 0.25 within 5%, converged on nearly every path."""
    grid = uniform_grid(1.0, 2**16)
    paths = sample_ensemble("bm(0.5)", grid, 100, SEED)
    settings = QvSettings(tol=0.1)

    estimates = _once(
        benchmark, lambda: [quadratic_variation(path, settings=settings) for path in paths]
    )

    mean = float(np.mean([e.qv.terminal for e in estimates]))
    assert abs(mean - 0.25) / 0.25 < 0.05
    assert sum(e.converged for e in estimates) >= 95


@pytest.mark.benchmark(group="acceptance")
def test_duality_sandwich_for_terminal_qv(benchmark: Any) -> None:
    """The capital cT and the Brownian lower bound for <S>_T are within 2%."""
    grid = uniform_grid(1.0, 2**12)
    paths = sample_ensemble("bm(1)", grid, 10_000, SEED)
    payoff = TerminalQvPayoff()
    cert = strategy_free_certificate(1.0, payoff.name)

    interval = _once(benchmark, duality_gap, payoff, cert, [paths], [INCREMENT_QV])

    assert interval.consistent
    assert interval.relative_gap <= 0.02


def test_picard_constants() -> None:
    """The envelope constant and the factorial bound."""
    assert picard_constant(1.0, 1.0, 1.0) == 10.0
    for n in range(21):
        expected = 0.7 * (10.0 * 0.6) ** n / math.factorial(n)
        assert picard_bound(n, 0.6, 0.7, 10.0) == pytest.approx(expected, rel=1e-12)


def _gbm_spec(grid: np.ndarray) -> SdeSpec:
    return SdeSpec(1.0, constant_drift(0.0), linear_diffusion(0.2), 0.2, time_driver(grid), 1.0)


def _mean_error(grid_steps: int) -> float:
    grid = uniform_grid(1.0, grid_steps)
    paths = sample_ensemble("bm(1)", grid, 200, SEED)
    solutions, _ = solve_sde(_gbm_spec(grid), paths, tol=1e-11, n_max=40)
    errors = [
        float(np.max(np.abs(x.scalar - gbm_closed_form(1.0, 0.2, path).scalar)))
        for x, path in zip(solutions, paths, strict=True)
    ]
    return float(np.mean(errors))


@pytest.mark.benchmark(group="acceptance")
def test_sde_convergence(benchmark: Any) -> None:
    """Picard converges superlinearly, uniquely and towards the closed form."""
    grid = uniform_grid(1.0, 2**12)
    paths = sample_ensemble("bm(1)", grid, 200, SEED)

    _, report = _once(benchmark, solve_sde, _gbm_spec(grid), paths, None, 1e-4)

    assert report.converged
    assert report.iterations <= 15
    assert all(ratio < 1.0 for ratio in report.ratios)
    assert report.ratios[-1] < report.ratios[0]
    assert report.unique is True
    assert _mean_error(2**12) >= 1.3 * _mean_error(2**14)


def test_combined_certificates_superhedge() -> None:
    """Capital adds exactly and the combined strategies superhedge the summed payoff."""
    rng = np.random.default_rng(SEED)
    grid = uniform_grid(1.0, 128)
    paths = sample_ensemble("bm(1)", grid, 10, SEED)
    qvs = [quadratic_variation(path).qv for path in paths]

    for _ in range(100):
        F, G = (_random_integrand(rng, grid, 1, 1) for _ in range(2))  # noqa: N806
        first = certify_sup_integral_sq(F, paths, qvs, m=int(rng.integers(0, 4)))
        second = certify_sup_integral_sq(G, paths, qvs, m=int(rng.integers(0, 4)))

        combined = combine_certificates([first, second])
        payoff = SumPayoff((SupIntegralSquaredPayoff(F), SupIntegralSquaredPayoff(G)))
        report = verify_superhedge(combined.lam, combined.strategies, paths, payoff, qvs)

        assert abs(combined.lam - (first.lam + second.lam)) <= 1e-12 * combined.lam
        assert report.passed


def _cli_outputs(directory: Path, spec: Path) -> dict[str, bytes]:
    common = ["--seed", "11", "--grid", "2^9", "--paths", "8", "--log-level", "WARNING"]
    runs = {
        "qv": ["qv"],
        "integrate": ["integrate"],
        "bdg": ["bdg", "--level", "2"],
        "outer": ["outer", "--payoff", "qv_T"],
        "duality": ["duality"],
        "sde": ["sde", "--spec", str(spec)],
    }
    for name, argv in runs.items():
        main([*argv, *common, "--out", str(directory / f"{name}.csv")])
    return {path.name: path.read_bytes() for path in sorted(directory.glob("*.csv"))}


@pytest.mark.integration
def test_cli_reruns_are_byte_identical(tmp_path: Path) -> None:
    """Every experiment writes the same CSV bytes when rerun with the same seed."""
    spec = write_document(
        tmp_path / "gbm.json", {"x0": 1.0, "diffusion": {"kind": "linear", "sigma0": 0.2}, "L": 0.2}
    )
    first, second = tmp_path / "first", tmp_path / "second"
    first.mkdir()
    second.mkdir()

    outputs = _cli_outputs(first, spec)

    assert {"qv.csv", "integrate.csv", "bdg.csv", "sde.csv"} <= set(outputs)
    assert outputs == _cli_outputs(second, spec)
