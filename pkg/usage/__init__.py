from __future__ import annotations

"""Public API for qsource computation metering."""

from .backends import AbstractMeter, NullMeter, PrometheusMeter
from .factory import get_meter
from .metrics import export_metrics

__all__ = ["AbstractMeter", "NullMeter", "PrometheusMeter", "export_metrics", "get_meter"]
