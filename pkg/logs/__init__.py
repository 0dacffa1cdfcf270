from __future__ import annotations

"""Structured run events: log records serialized as JSON lines."""

import logging
import threading
import time
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

_LEVEL_NAMES = {
    logging.DEBUG: "debug",
    logging.INFO: "info",
    logging.WARNING: "warn",
    logging.ERROR: "error",
    logging.CRITICAL: "fatal",
}

# Attributes every LogRecord carries; anything else came in through ``extra=``.
_RECORD_ATTRS = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class LogLevel(str, Enum):
    debug = "debug"
    info = "info"
    warn = "warn"
    error = "error"
    fatal = "fatal"

    @classmethod
    def from_record(cls, record: logging.LogRecord) -> "LogLevel":
        return cls(_LEVEL_NAMES.get(record.levelno, "info"))

    def to_logging(self) -> int:
        return {v: k for k, v in _LEVEL_NAMES.items()}[self.value]


class RunEvent(BaseModel):
    run_id: str
    level: LogLevel
    message: str
    timestamp: float = Field(default_factory=lambda: time.time())
    scenario: str | None = None
    logger: str | None = None
    fields: dict[str, Any] = Field(default_factory=dict)


class JsonLinesHandler(logging.Handler):
    """Append every record to ``path`` as one :class:`RunEvent` per line."""

    def __init__(self, path: str | Path, run_id: str, scenario: str | None = None) -> None:
        super().__init__()
        self.path = Path(path)
        self.run_id = run_id
        self.scenario = scenario
        self._io_lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def emit(self, record: logging.LogRecord) -> None:
        try:
            event = RunEvent(
                run_id=self.run_id,
                level=LogLevel.from_record(record),
                message=record.getMessage(),
                timestamp=record.created,
                scenario=self.scenario,
                logger=record.name,
                fields={
                    k: v if isinstance(v, (int, float, str, bool, type(None))) else repr(v)
                    for k, v in vars(record).items()
                    if k not in _RECORD_ATTRS
                },
            )
            line = event.model_dump_json() + "\n"
            with self._io_lock, self.path.open("a", encoding="utf-8") as fh:
                fh.write(line)
        except Exception:  # pragma: no cover - logging must not raise
            self.handleError(record)


def configure_logging(
    level: LogLevel | str = LogLevel.info,
    events_path: str | Path | None = None,
    run_id: str = "local",
    scenario: str | None = None,
) -> JsonLinesHandler | None:
    """Console logging at ``level`` plus an optional events file.

    Returns the events handler so callers can detach it when the run ends.
    """
    lvl = LogLevel(level) if isinstance(level, str) else level
    root = logging.getLogger()
    root.setLevel(lvl.to_logging())
    for h in [h for h in root.handlers if getattr(h, "_qsource_console", False)]:
        root.removeHandler(h)
    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    console._qsource_console = True  # type: ignore[attr-defined]
    root.addHandler(console)
    if events_path is None:
        return None
    handler = JsonLinesHandler(events_path, run_id, scenario)
    root.addHandler(handler)
    return handler
