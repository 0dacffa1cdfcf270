from __future__ import annotations

"""Write meter contents next to the reports."""

from pathlib import Path

from .backends import AbstractMeter


def export_metrics(meter: AbstractMeter, path: str | Path) -> Path | None:
    """Write a Prometheus text file for ``meter``; ``None`` for meters without a registry."""
    registry = getattr(meter, "registry", None)
    if registry is None:
        return None
    from prometheus_client import write_to_textfile

    path = Path(path)
    try:
        write_to_textfile(str(path), registry)
    except OSError as exc:
        raise OSError(f"cannot write metrics to {path}: {exc}") from exc
    return path
