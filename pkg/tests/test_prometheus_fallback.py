import logging

import usage.backends as backends
from usage import NullMeter, export_metrics, get_meter


def test_prometheus_backend_falls_back_to_null_when_unavailable(monkeypatch, caplog):
    monkeypatch.setattr(backends, "Counter", None)

    with caplog.at_level(logging.WARNING, logger="usage.factory"):
        meter = get_meter("prometheus")

    assert isinstance(meter, NullMeter)
    assert "falling back to NullMeter" in caplog.text


def test_unknown_backend_is_null(monkeypatch):
    monkeypatch.setenv("QSOURCE_METERING", "statsd")
    assert isinstance(get_meter(), NullMeter)


def test_default_backend_is_null(monkeypatch):
    monkeypatch.delenv("QSOURCE_METERING", raising=False)
    meter = get_meter()
    assert isinstance(meter, NullMeter)
    assert export_metrics(meter, "unused.prom") is None
