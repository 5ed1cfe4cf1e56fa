from .config import ConfigError, ExperimentConfig, load_config
from .io import COLUMNS, emit_plot_script, read_results, write_results
from .runner import (ExperimentError, PointStatistics, SummaryRow, SweepPoint, collect_statistics,
                     make_points, run_experiment)
from .cli import cli_main

__all__ = [
    "COLUMNS", "ConfigError", "ExperimentConfig", "ExperimentError", "PointStatistics",
    "SummaryRow", "SweepPoint", "cli_main", "collect_statistics", "emit_plot_script",
    "load_config", "make_points", "read_results", "run_experiment", "write_results",
]
