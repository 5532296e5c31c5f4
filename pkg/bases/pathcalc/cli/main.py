"""``pathcalc`` command-line entry point.

Exit codes: 0 on success, 1 on usage or configuration errors, 2 when an experiment finds
a property violation.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

from pathcalc.core.common.exceptions import ConfigError, PathcalcError
from pathcalc.core.common.logging import StructuredLogger, configure_logging
from pathcalc.core.common.observability import init_observability
from pathcalc.infrastructure.observability import (
    MetricConfig,
    OtelTracingProvider,
    PrometheusMetrics,
)

from .config import build_config, read_config_file
from .experiments import run_experiment
from .report import emit_report

logger = StructuredLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

# Options that are not experiment settings.
_RUNTIME_OPTIONS = ("command", "config", "trace")


class UsageErrorParser(argparse.ArgumentParser):
    """Argument parser that exits with the usage code instead of argparse's 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_options() -> argparse.ArgumentParser:
    common = UsageErrorParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--seed", help="root seed (unsigned 64-bit)")
    common.add_argument("--grid", help="grid steps, e.g. 4096 or 2^12")
    common.add_argument("--c", help="slope bound of the prediction set")
    common.add_argument("--T", dest="T", help="horizon")
    common.add_argument("--paths", help="ensemble size")
    common.add_argument("--tol", help="tolerance override")
    common.add_argument("--out", help="main output (CSV, or JSON report)")
    common.add_argument("--report", help="JSON report location")
    common.add_argument("--measure", help="sampler law, e.g. bm:1.0 or tcbm:ramp:1.0")
    common.add_argument("--offset", help="start value of sampled paths")
    common.add_argument("--path", help="CSV path or ensemble file instead of sampling")
    common.add_argument("--n-jobs", dest="n_jobs", help="worker processes")
    common.add_argument("--metrics-out", dest="metrics_out", help="Prometheus textfile")
    common.add_argument("--log-level", dest="log_level", help="logging level, default INFO")
    common.add_argument("--trace", action="store_true", help="emit OpenTelemetry spans")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per experiment plus ``run`` for config-only use."""
    common = _global_options()
    parser = UsageErrorParser(prog="pathcalc", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=UsageErrorParser
    )

    commands.add_parser("run", parents=[common], help="experiment named in --config")
    qv = commands.add_parser("qv", parents=[common], help="quadratic variation")
    qv.add_argument("--m-max", dest="m_max")

    integrate = commands.add_parser("integrate", parents=[common], help="integral as a limit")
    integrate.add_argument("--integrand")
    integrate.add_argument("--mode", choices=("h2", "hinf"))
    integrate.add_argument("--schedule", help="comma separated piece counts")

    bdg = commands.add_parser("bdg", parents=[common], help="BDG certificate")
    bdg.add_argument("--integrand")
    bdg.add_argument("--level", help="finest crossing level of the strategies")

    for name in ("outer", "duality"):
        sub = commands.add_parser(name, parents=[common], help=f"{name} bounds")
        sub.add_argument("--payoff")
        sub.add_argument("--integrand")
        sub.add_argument("--level")

    sde = commands.add_parser("sde", parents=[common], help="Picard solution of an SDE")
    sde.add_argument("--spec")
    sde.add_argument("--nmax")

    commands.add_parser("selftest", parents=[common], help="deterministic suites")
    return parser


def _flags(args: argparse.Namespace) -> dict[str, Any]:
    flags = {k: v for k, v in vars(args).items() if k not in _RUNTIME_OPTIONS}
    if args.command != "run":
        flags["experiment"] = args.command
    return flags


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one experiment and write its report."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    metrics = PrometheusMetrics(MetricConfig(textfile=args.metrics_out))
    init_observability(
        metrics_provider=metrics,
        tracing_provider=OtelTracingProvider() if args.trace else None,
    )
    try:
        file_values = read_config_file(args.config) if args.config else {}
        config = build_config(file_values, _flags(args))
        configure_logging(config.log_level)
        result = run_experiment(config)
        emit_report(result, config)
    except ConfigError as e:
        logger.error("Configuration error", key=e.key, reason=e.reason)
        print(f"pathcalc: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PathcalcError, OSError) as e:
        logger.error("Experiment aborted", error=str(e), kind=type(e).__name__)
        print(f"pathcalc: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        metrics.flush()
    if result.violations:
        for violation in result.violations:
            print(f"pathcalc: violation: {violation}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
