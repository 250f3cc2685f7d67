"""Monte Carlo experiment harness and command line interface."""

from .config import ExperimentConfig, SchemeSpec, load_config, parse_config_text, parse_scheme
from .harness import precode_once, run_experiment, run_mse_sweep, run_ser_vs_antennas, run_ser_vs_snr
from .table import ResultTable, emit_table, read_table
from .analysis import gap_at, interpolate_crossing

__all__ = [
    "ExperimentConfig",
    "SchemeSpec",
    "load_config",
    "parse_config_text",
    "parse_scheme",
    "precode_once",
    "run_experiment",
    "run_mse_sweep",
    "run_ser_vs_antennas",
    "run_ser_vs_snr",
    "ResultTable",
    "emit_table",
    "read_table",
    "gap_at",
    "interpolate_crossing",
]
