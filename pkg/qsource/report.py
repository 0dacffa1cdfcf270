from __future__ import annotations

"""CSV and JSON report files for one scenario run."""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, computed_field

from .config import ExperimentConfig
from .runner import Invariant, ScenarioResult

log = logging.getLogger(__name__)

CSV_NAME = "results.csv"
SUMMARY_NAME = "summary.json"


def format_value(value: Any) -> str:
    """12 significant digits for numbers, ``true``/``false`` for flags, empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return str(value)


def render_csv(result: ScenarioResult, version: str = "") -> str:
    """Header comment documenting each column, then the header row and data rows."""
    buf = io.StringIO()
    tool = f"qsource-lab {version}" if version else "qsource-lab"
    buf.write(f"# {tool} scenario={result.scenario.value}\n")
    if result.family:
        buf.write(f"# source: {result.family}\n")
    if result.pom:
        buf.write(f"# pom: {result.pom}\n")
    buf.write("# columns:\n")
    for name, desc in result.columns:
        buf.write(f"#   {name}: {desc}\n")
    names = [name for name, _ in result.columns]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in result.rows:
        writer.writerow([format_value(row.get(name)) for name in names])
    return buf.getvalue()


class RunSummary(BaseModel):
    version: str
    scenario: str
    seed: int
    rows: int
    config: dict[str, Any]
    invariants: list[Invariant]
    details: dict[str, Any]

    @computed_field
    @property
    def all_passed(self) -> bool:
        return all(i.passed for i in self.invariants if i.asserted)


def emit_report(
    result: ScenarioResult,
    out_dir: str | Path,
    config: ExperimentConfig | None = None,
    version: str = "",
) -> tuple[Path, Path]:
    """Write ``results.csv`` and ``summary.json`` under ``out_dir``."""
    out = Path(out_dir)
    csv_path, summary_path = out / CSV_NAME, out / SUMMARY_NAME
    summary = RunSummary(
        version=version,
        scenario=result.scenario.value,
        seed=config.seed if config is not None else 0,
        rows=len(result.rows),
        config=config.model_dump(mode="json") if config is not None else {},
        invariants=result.invariants,
        details=result.details,
    )
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(render_csv(result, version), encoding="utf-8")
        summary_path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    log.info("wrote %d rows to %s", len(result.rows), csv_path)
    return csv_path, summary_path
