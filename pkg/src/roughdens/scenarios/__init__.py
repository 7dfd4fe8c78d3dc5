"""Named experiments, their configuration and reports, and the CLI."""

from .config import CONFIG_KEYS, ScenarioConfig, parse_config_text, read_config_file
from .registry import default_config, list_scenarios, run_scenario
from .report import CHECK_BASES, CHECK_KINDS, CheckRecord, ScenarioReport, emit_report, load_report

__all__ = [
    "CONFIG_KEYS", "ScenarioConfig", "parse_config_text", "read_config_file",
    "default_config", "list_scenarios", "run_scenario",
    "CHECK_BASES", "CHECK_KINDS", "CheckRecord", "ScenarioReport", "emit_report", "load_report",
]
