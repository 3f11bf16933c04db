"""Orchestration layer: configuration, initial data, monitors, file
formats, and the run drivers behind the CLI."""

from .config import RunConfig, load_config, parse_config, serialize_config
from .initial import InitialDataSpec, extract_bounds, generate_initial
from .monitor import FIELD_NAMES, Monitor, MonitorRecord, records_to_csv, write_csv
from .runs import (ConvergenceReport, SimulationResult, VerificationReport,
                   format_report, report_to_kv, run_check, run_mms,
                   run_simulate, run_verify)
from .snapshot import read_snapshot, write_snapshot

__all__ = [
    "RunConfig", "load_config", "parse_config", "serialize_config",
    "InitialDataSpec", "extract_bounds", "generate_initial",
    "FIELD_NAMES", "Monitor", "MonitorRecord", "records_to_csv", "write_csv",
    "ConvergenceReport", "SimulationResult", "VerificationReport",
    "format_report", "report_to_kv", "run_check", "run_mms",
    "run_simulate", "run_verify",
    "read_snapshot", "write_snapshot",
]
