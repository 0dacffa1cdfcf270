from __future__ import annotations

"""Computation metering backends for qsource runs."""

import logging
from typing import Protocol

logger = logging.getLogger(__name__)

try:
    from prometheus_client import CollectorRegistry, Counter
except ImportError:  # pragma: no cover - optional dep
    CollectorRegistry = Counter = None  # type: ignore[assignment,misc]


class AbstractMeter(Protocol):
    """Interface for per-point computation accounting."""

    def record(self, scenario: str, outcome: str, seconds: float) -> None:
        """Account for one evaluated scenario point."""
        ...


class NullMeter:
    """No-op meter."""

    def record(self, scenario: str, outcome: str, seconds: float) -> None:  # pragma: no cover - trivial
        return


class PrometheusMeter:
    """Prometheus counters in a registry private to this meter."""

    def __init__(self) -> None:
        if Counter is None:
            raise ImportError("prometheus_client is required for this backend")
        self.registry = CollectorRegistry()
        self.points = Counter(
            "qsource_points",
            "Scenario points evaluated",
            ["scenario", "outcome"],
            registry=self.registry,
        )
        self.seconds = Counter(
            "qsource_compute_seconds",
            "Wall time spent evaluating scenario points",
            ["scenario"],
            registry=self.registry,
        )

    def record(self, scenario: str, outcome: str, seconds: float) -> None:
        self.points.labels(scenario=scenario, outcome=outcome).inc()
        self.seconds.labels(scenario=scenario).inc(max(seconds, 0.0))
        logger.debug("metered %s point (%s, %.3fs)", scenario, outcome, seconds)
