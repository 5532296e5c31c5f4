"""Experiment runners behind the ``pathcalc`` subcommands.

Each runner turns an :class:`ExperimentConfig` into an :class:`ExperimentResult`. Property
violations are collected in the result rather than raised; the entry point maps them to
exit code 2.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import partial
from typing import Any

import numpy as np

from pathcalc.core.common.exceptions import ConfigError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.observability import get_observability
from pathcalc.core.common.statistics import mean_estimate
from pathcalc.core.execution import PoolSettings, map_paths
from pathcalc.core.hedging import (
    Payoff,
    SuperhedgeReport,
    SuperhedgeSettings,
    ito_decomposition_residual,
    pathwise_bdg_check,
    payoff_from_name,
)
from pathcalc.core.integration import (
    IntegrandSource,
    OperatorPathFunctional,
    SimpleIntegrand,
    integrate_simple,
    resolve_integrand,
)
from pathcalc.core.limits import LimitApproximation, default_schedule, integrate_h2, integrate_hinf
from pathcalc.core.outer import (
    HedgingCertificate,
    certify_sup_integral_sq,
    duality_gap,
    mc_lower_bound,
    strategy_free_certificate,
    verify_certificate,
    weak_isometry_gap,
)
from pathcalc.core.paths import (
    PathSet,
    PredictionSetSpec,
    QvSettings,
    SamplePath,
    check_xi_c,
    deterministic_ensemble,
    path_rng,
    quadratic_variation,
    qv_of,
    realized_variance,
    sample_ensemble,
    uniform_grid,
)
from pathcalc.core.sde import PicardSettings, solve_sde
from pathcalc.infrastructure.files import (
    decode_functional,
    read_document,
    read_ensemble,
    read_integrand,
    read_sde_spec,
)

from .config import ExperimentConfig

logger = StructuredLogger(__name__)

Table = tuple[list[str], list[list[float]]]

_VERDICT_CODES = {"true": 1.0, "false": 0.0, "indeterminate": -1.0}


@dataclass
class ExperimentResult:
    """Outcome of one experiment.

    Attributes:
        experiment: Experiment name
        summary: JSON-ready headline numbers
        tables: Named CSV tables (columns, rows)
        paths: Output paths written as the main CSV, if any
        documents: Extra JSON documents such as certificates
        violations: Property violations found
    """

    experiment: str
    summary: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    paths: list[SamplePath] | None = None
    documents: dict[str, dict[str, Any]] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "violation" if self.violations else "ok"


# === Shared plumbing ===


def _pool(config: ExperimentConfig) -> PoolSettings:
    return PoolSettings(n_jobs=config.n_jobs)


def _spec(config: ExperimentConfig) -> PredictionSetSpec:
    return PredictionSetSpec(config.c, config.T)


def _qv_settings(config: ExperimentConfig) -> QvSettings:
    return QvSettings(m_max=config.m_max, tol=config.tol or 0.05)


def _ensemble(config: ExperimentConfig, law: str | None = None) -> PathSet:
    """Paths from ``config.path`` or sampled from the configured law on the uniform grid."""
    if config.path and law is None:
        return deterministic_ensemble(read_ensemble(config.path))
    return sample_ensemble(
        law or config.law,
        uniform_grid(config.T, config.grid),
        config.paths,
        config.seed,
        offset=config.offset,
        spec=_spec(config),
    )


def _integrand(config: ExperimentConfig, times: np.ndarray) -> IntegrandSource:
    if config.integrand is None:
        return SimpleIntegrand.constant(times, [[1.0]])
    return read_integrand(config.integrand, times)


def _functional(config: ExperimentConfig) -> OperatorPathFunctional:
    if config.integrand is None:
        return OperatorPathFunctional.constant([[1.0]])
    return decode_functional(read_document(config.integrand, "integrand"))


def _verdict_rows(report: SuperhedgeReport) -> list[list[float]]:
    return [
        [v.index, v.payoff, v.admissibility_margin, v.terminal_margin, float(v.passed)]
        for v in report.verdicts
    ]


_VERDICT_COLUMNS = ["path_id", "payoff", "admissibility_margin", "terminal_margin", "passed"]


# === qv ===


def _qv_row(
    index: int, *, paths: PathSet, settings: QvSettings, spec: PredictionSetSpec
) -> list[float]:
    path = paths[index]
    estimate = quadratic_variation(path, settings=settings)
    xi = check_xi_c(path, estimate.qv, spec)
    return [
        index,
        estimate.qv.terminal,
        estimate.m_used,
        float(estimate.converged),
        _VERDICT_CODES[xi.verdict],
    ]


def run_qv(config: ExperimentConfig) -> ExperimentResult:
    """Adaptive quadratic variation and prediction-set diagnostics per path."""
    paths = _ensemble(config)
    rows = map_paths(
        partial(_qv_row, paths=paths, settings=_qv_settings(config), spec=_spec(config)),
        range(len(paths)),
        _pool(config),
    )
    terminal = mean_estimate([row[1] for row in rows])
    codes = [row[4] for row in rows]
    summary = {
        "qv_T": terminal.mean,
        "qv_T_se": terminal.standard_error,
        "paths": len(rows),
        "converged": int(sum(row[3] for row in rows)),
        "xi_true": codes.count(1.0),
        "xi_false": codes.count(0.0),
        "xi_indeterminate": codes.count(-1.0),
        "cT": config.c * config.T,
    }
    columns = ["path_id", "qv_T", "level", "converged", "xi_verdict"]
    return ExperimentResult("qv", summary, {"qv": (columns, rows)})


# === integrate ===


def _approximate(
    index: int,
    *,
    F: OperatorPathFunctional,  # noqa: N803
    paths: PathSet,
    config: ExperimentConfig,
    schedule: list[int],
) -> LimitApproximation:
    path = paths[index]
    settings = _qv_settings(config)
    qv = qv_of(path, settings, index)
    if config.mode == "hinf":
        return integrate_hinf(F, path, qv, paths, schedule, qvs=settings, c=config.c)
    return integrate_h2(F, path, qv, config.c, schedule)


def run_integrate(config: ExperimentConfig) -> ExperimentResult:
    """Integral of a functional integrand as a limit along a refinement schedule."""
    F = _functional(config)  # noqa: N806
    paths = _ensemble(config)
    schedule = list(config.schedule or default_schedule(len(paths[0]) - 1))
    approximations = map_paths(
        partial(_approximate, F=F, paths=paths, config=config, schedule=schedule),
        range(len(paths)),
        _pool(config),
    )
    rows = [
        [index, pieces, error]
        for index, approx in enumerate(approximations)
        for pieces, error in zip(approx.schedule[1:], approx.level_errors)
    ]
    summary = {
        "mode": config.mode,
        "schedule": list(approximations[0].schedule),
        "terminal": [float(a.integral.values[-1, 0]) for a in approximations],
        "error_estimate": [a.error_estimate for a in approximations],
        "cauchy": [a.cauchy for a in approximations],
        "clamped": [a.clamped for a in approximations],
        "membership": [a.membership for a in approximations],
    }
    return ExperimentResult(
        "integrate",
        summary,
        {"levels": (["path_id", "pieces", "level_error"], rows)},
        paths=[a.integral for a in approximations],
    )


# === bdg ===


def _doob_row(index: int, *, F: IntegrandSource, paths: PathSet) -> list[float]:  # noqa: N803
    path = paths[index]
    integral = integrate_simple(resolve_integrand(F, path), path).values
    lhs, rhs = pathwise_bdg_check(integral[:, 0])
    return [index, lhs, rhs]


def _doob_violations(rows: list[list[float]]) -> list[str]:
    return [
        f"Doob inequality fails on path {int(i)}: {lhs:.6g} > {rhs:.6g}"
        for i, lhs, rhs in rows
        if lhs > rhs + 1e-9 * (1.0 + abs(rhs))
    ]


def run_bdg(config: ExperimentConfig) -> ExperimentResult:
    """BDG certificate for ``sup (F . S)^2`` verified on an ensemble, plus Doob checks."""
    paths = _ensemble(config)
    F = _integrand(config, paths[0].times)  # noqa: N806
    qvs = _qv_settings(config)
    pool = _pool(config)
    cert = certify_sup_integral_sq(F, paths, qvs, config.level, verify=False, pool=pool)
    payoff = payoff_from_name("sup_integral_sq", F)
    cert, report = verify_certificate(
        cert, paths, payoff, qvs, settings=SuperhedgeSettings(tol=config.tol), pool=pool
    )
    doob = map_paths(partial(_doob_row, F=F, paths=paths), range(len(paths)), pool)
    isometry = weak_isometry_gap(F, paths, qvs, pool=pool)
    violations = _doob_violations(doob)
    if not report.passed:
        violations.append(f"certificate fails on paths {report.failures[:10]}")
    summary = {
        "lambda": cert.lam,
        "paths": len(paths),
        "failures": len(report.failures),
        "worst_admissibility": report.worst_admissibility,
        "worst_terminal": report.worst_terminal,
        "max_payoff": report.max_payoff,
        "isometry_difference": isometry.difference.mean,
        "isometry_difference_se": isometry.difference.standard_error,
    }
    return ExperimentResult(
        "bdg",
        summary,
        {
            "verdicts": (_VERDICT_COLUMNS, _verdict_rows(report)),
            "doob": (["path_id", "lhs", "rhs"], doob),
        },
        documents={"certificate": {"certificate": cert.to_dict()}},
        violations=violations,
    )


# === outer / duality ===


def _certificate(
    payoff: Payoff, F: IntegrandSource, paths: PathSet, config: ExperimentConfig  # noqa: N803
) -> tuple[HedgingCertificate, SuperhedgeReport | None]:
    """A certificate for ``payoff`` and, where it needs one, its verification report.

    The bound ``<S>_T <= cT`` holds on the prediction set by definition, so the strategy-free
    certificate for the terminal QV is not checked against estimated QVs.
    """
    qvs = _qv_settings(config)
    pool = _pool(config)
    if payoff.name in ("sup_integral_sq", "terminal_integral_sq"):
        cert = certify_sup_integral_sq(F, paths, qvs, config.level, verify=False, pool=pool)
    elif payoff.name in ("qv_T", "terminal_qv"):
        return strategy_free_certificate(config.c * config.T, payoff.name), None
    elif payoff.name == "constant":
        cert = strategy_free_certificate(payoff(paths[0], qv_of(paths[0], qvs, 0)), "constant")
    else:
        cert = strategy_free_certificate(0.0, payoff.name)
    settings = SuperhedgeSettings(tol=config.tol)
    return verify_certificate(cert, paths, payoff, qvs, settings=settings, pool=pool)


def _bracket(config: ExperimentConfig, experiment: str, laws: list[str]) -> ExperimentResult:
    paths = _ensemble(config)
    F = _integrand(config, paths[0].times)  # noqa: N806
    payoff = payoff_from_name(config.payoff, F)
    cert, report = _certificate(payoff, F, paths, config)
    samplers = [paths, *(_ensemble(config, law) for law in laws)]
    qvs = [_qv_settings(config)] * len(samplers)
    pool = _pool(config)
    interval = duality_gap(payoff, cert, samplers, qvs, pool=pool)
    violations = []
    if not interval.consistent:
        violations.append(
            f"weak duality: lower {interval.lower:.6g} exceeds upper {interval.upper:.6g}"
        )
    if report is not None and not report.passed:
        violations.append(f"certificate fails on paths {report.failures[:10]}")
    tags = [getattr(s, "measure_tag", "paths") for s in samplers]
    summary = {
        **interval.to_dict(),
        "payoff": payoff.name,
        "certificate": f"{experiment}.certificate.json",
        "verification": "ensemble" if report is not None else "prediction set",
        "samplers": tags,
    }
    tables: dict[str, Table] = {}
    if report is not None:
        tables["verdicts"] = (_VERDICT_COLUMNS, _verdict_rows(report))
    if len(samplers) > 1:
        lower = mc_lower_bound(payoff, samplers, qvs, pool=pool)
        summary["best_sampler"] = tags[lower.sampler_index]
        tables["samplers"] = (
            ["sampler", "mean", "se", "samples"],
            [
                [k, est.mean, est.standard_error, est.samples]
                for k, est in enumerate(lower.per_sampler)
            ],
        )
    return ExperimentResult(
        experiment,
        summary,
        tables,
        documents={"certificate": {"certificate": cert.to_dict()}},
        violations=violations,
    )


def run_outer(config: ExperimentConfig) -> ExperimentResult:
    """Certified upper bound and Monte Carlo lower bound for one payoff."""
    return _bracket(config, "outer", [])


def run_duality(config: ExperimentConfig) -> ExperimentResult:
    """Duality bracket with lower bounds maximized over several supported laws.

    Besides the configured law, time-changed Brownian motions with ramp and sine rate
    shapes at the full slope ``c`` are sampled.
    """
    laws = [f"time_changed_bm(ramp,{config.c:.17g})", f"time_changed_bm(sine,{config.c:.17g})"]
    return _bracket(config, "duality", laws)


# === sde ===


def run_sde(config: ExperimentConfig) -> ExperimentResult:
    """Picard solution of the SDE in ``config.spec`` on every path."""
    if config.spec is None:
        raise ConfigError("spec", "the sde experiment needs an SDE spec file")
    paths = _ensemble(config)
    spec = read_sde_spec(config.spec, paths[0].times)
    settings = PicardSettings(tol=config.tol or 1e-4, n_max=config.nmax)
    solutions, report = solve_sde(spec, paths, settings=settings, pool=_pool(config))
    violations = []
    if not report.converged:
        violations.append(f"Picard iteration did not converge in {config.nmax} sweeps")
    if report.unique is False:
        violations.append(f"two starts disagree by {report.uniqueness_distance:.6g}")
    rows = [[n, g, bound] for n, (g, bound) in enumerate(zip(report.g, report.envelope), 1)]
    return ExperimentResult(
        "sde",
        {"picard": report.to_dict(), "spec": spec.name, "paths": len(paths)},
        {"picard": (["n", "g", "envelope"], rows)},
        paths=solutions,
        violations=violations,
    )


# === selftest ===


def _doob_suite(seed: int, n_sequences: int = 200) -> list[str]:
    sequences: list[np.ndarray] = [np.array(x, dtype=float) for x in ((0, 1), (1, 0), (3,))]
    sequences += [path_rng(seed, i).standard_normal(20).cumsum() for i in range(n_sequences)]
    rows = [[i, *pathwise_bdg_check(x)] for i, x in enumerate(sequences)]
    return _doob_violations(rows)


def _ito_suite(paths: PathSet, tol: float = 1e-8) -> list[str]:
    found = []
    for index, path in enumerate(paths):
        rng = path_rng(0, index)
        F = SimpleIntegrand.from_stop_times(  # noqa: N806
            path.times, [0.0, 0.25 * path.T, 0.5 * path.T], rng.standard_normal(3)
        )
        residual = ito_decomposition_residual(F, path, realized_variance(path)).scalar
        scale = 1.0 + float(np.max(np.abs(path.values))) ** 2
        if np.max(np.abs(residual)) > tol * scale:
            found.append(f"Ito residual {np.max(np.abs(residual)):.3g} on path {index}")
    return found


def run_selftest(config: ExperimentConfig) -> ExperimentResult:
    """Deterministic suites at reduced scale: Doob inequality, Ito residual, BDG certificate."""
    seed = config.seed or 0
    paths = sample_ensemble(
        "bm(1)", uniform_grid(1.0, min(config.grid, 1024)), min(config.paths, 50), seed
    )
    suites: dict[str, Callable[[], list[str]]] = {
        "doob": partial(_doob_suite, seed),
        "ito_residual": partial(_ito_suite, paths),
        "bdg_certificate": partial(_certificate_suite, paths),
    }
    outcomes = {name: suite() for name, suite in suites.items()}
    return ExperimentResult(
        "selftest",
        {name: f"{len(found)} violations" if found else "ok" for name, found in outcomes.items()},
        violations=[v for found in outcomes.values() for v in found],
    )


def _certificate_suite(paths: PathSet) -> list[str]:
    F = SimpleIntegrand.constant(paths[0].times, [[1.0]])  # noqa: N806
    cert = certify_sup_integral_sq(F, paths, QvSettings(), 3, verify=False)
    _, report = verify_certificate(cert, paths, payoff_from_name("sup_integral_sq", F))
    return [f"certificate fails on path {i}" for i in report.failures]


RUNNERS: dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    "qv": run_qv,
    "integrate": run_integrate,
    "bdg": run_bdg,
    "outer": run_outer,
    "duality": run_duality,
    "sde": run_sde,
    "selftest": run_selftest,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the configured experiment with an experiment span and timing.

    Raises:
        ConfigError: If the experiment is unknown or its inputs are malformed.
    """
    runner = RUNNERS.get(config.experiment)
    if runner is None:
        raise ConfigError("experiment", f"unknown experiment {config.experiment!r}")
    hooks = get_observability()
    logger.info("Experiment started", experiment=config.experiment, seed=config.seed)
    started = time.perf_counter()
    with hooks.span("experiment", experiment=config.experiment, seed=config.seed):
        result = runner(config)
    result.seconds = time.perf_counter() - started
    hooks.record_experiment(config.experiment, result.status, result.seconds)
    for violation in result.violations:
        hooks.record_violation(config.experiment, violation)
    logger.info(
        "Experiment finished",
        experiment=config.experiment,
        status=result.status,
        violations=len(result.violations),
        seconds=round(result.seconds, 3),
    )
    return result
