"""Batch experiment driver for pathcalc."""

from .config import EXPERIMENTS, ExperimentConfig, build_config, parse_grid, read_config_file
from .experiments import ExperimentResult, run_experiment
from .main import main
from .report import emit_report

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentResult",
    "build_config",
    "emit_report",
    "main",
    "parse_grid",
    "read_config_file",
    "run_experiment",
]
