from __future__ import annotations

"""Factory for metering backends."""

import logging
import os

from .backends import AbstractMeter, NullMeter, PrometheusMeter

log = logging.getLogger(__name__)


def _select_backend() -> str:
    """Return the backend name from ``QSOURCE_METERING``."""
    return (os.getenv("QSOURCE_METERING") or "null").strip().lower()


def get_meter(kind: str | None = None) -> AbstractMeter:
    """Return an instance of the requested meter (env-selected when ``kind`` is None)."""
    kind = (kind or _select_backend()).lower()

    if kind == "prometheus":
        try:
            return PrometheusMeter()
        except ImportError as exc:
            log.warning(
                "Prometheus metering unavailable: %s – "
                "falling back to NullMeter. "
                "Install with: pip install 'qsource-lab[metrics]'",
                exc,
            )
            return NullMeter()

    if kind not in ("null", "none", ""):
        log.warning("unknown metering backend %r; using NullMeter", kind)
    return NullMeter()
