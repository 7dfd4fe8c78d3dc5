"""Scenario registry: listing, default configs and execution."""

from __future__ import annotations

import os
import time

from ..errors import RoughDensError, UsageError
from ..estimators.io import write_sweep_csv
from .config import ScenarioConfig
from .library import SCENARIOS, ScenarioContext
from .report import ScenarioReport, emit_report

__all__ = ["list_scenarios", "default_config", "run_scenario"]


def list_scenarios() -> list:
    return [{"name": s.name, "anchor": s.anchor, "description": s.description}
            for s in SCENARIOS.values()]


def _definition(name: str):
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UsageError(f"unknown scenario {name!r}; known: {sorted(SCENARIOS)}") from None


def default_config(name: str) -> ScenarioConfig:
    return _definition(name).default_config()


def _with_context(exc: Exception, name: str) -> Exception:
    msg = f"scenario {name}: {exc}"
    try:
        new = type(exc)(msg)
    except TypeError:
        new = RoughDensError(msg)
    return new


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Validate ``config``, run the scenario and, if ``output_dir`` is set,
    write the sweep tables and the report (CSV and JSON) there."""
    definition = _definition(config.name)
    config.validate(definition.model_defaults, definition.tolerances)
    ctx = ScenarioContext(definition, config)
    start = time.perf_counter()
    try:
        definition.run(config, ctx)
    except RoughDensError as exc:
        raise _with_context(exc, config.name) from exc
    report = ScenarioReport(config.name, ctx.checks, config.echo(),
                            wall_time=time.perf_counter() - start)
    if config.output_dir:
        os.makedirs(config.output_dir, exist_ok=True)
        for table, pairs in sorted(ctx.tables.items()):
            path = os.path.join(config.output_dir, f"{config.name}_{table}.csv")
            write_sweep_csv(pairs, path)
            report.artifacts.append(path)
        for fmt in ("json", "csv"):
            path = os.path.join(config.output_dir, f"{config.name}_report.{fmt}")
            emit_report(report, fmt, path)
            report.artifacts.append(path)
    return report
