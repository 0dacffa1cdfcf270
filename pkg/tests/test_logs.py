import json
import logging

import pytest

from logs import JsonLinesHandler, LogLevel, RunEvent, configure_logging


@pytest.fixture
def events(tmp_path):
    handler = JsonLinesHandler(tmp_path / "run" / "events.jsonl", "r1", "aep")
    logger = logging.getLogger("qsource.test")
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG)
    yield handler
    logger.removeHandler(handler)
    handler.close()


def _lines(handler):
    return [json.loads(line) for line in handler.path.read_text().splitlines()]


def test_records_become_run_events(events):
    logging.getLogger("qsource.test").warning("atypical mass %.3f", 0.3868, extra={"n": 16})

    (event,) = _lines(events)
    assert event["run_id"] == "r1"
    assert event["level"] == "warn"
    assert event["message"] == "atypical mass 0.387"
    assert event["scenario"] == "aep"
    assert event["logger"] == "qsource.test"
    assert event["fields"] == {"n": 16}
    assert isinstance(event["timestamp"], float)


def test_non_json_extras_are_repr(events):
    logging.getLogger("qsource.test").info("point", extra={"shape": (2, 2), "obj": object})

    (event,) = _lines(events)
    assert event["fields"]["shape"] == "(2, 2)"
    assert event["fields"]["obj"].startswith("<class")


def test_level_mapping():
    assert LogLevel.warn.to_logging() == logging.WARNING
    assert LogLevel.fatal.to_logging() == logging.CRITICAL
    record = logging.makeLogRecord({"levelno": logging.ERROR})
    assert LogLevel.from_record(record) is LogLevel.error


def test_run_event_validation():
    with pytest.raises(ValueError):
        RunEvent(run_id="r1", level="verbose", message="hi")
    assert RunEvent(run_id="r1", level="info", message="hi").fields == {}


def test_configure_logging_replaces_console_handler(tmp_path):
    root = logging.getLogger()
    before = [h for h in root.handlers if getattr(h, "_qsource_console", False)]
    level = root.level
    first = configure_logging("debug", tmp_path / "a.jsonl", "run-a")
    second = configure_logging(LogLevel.error, None)
    try:
        consoles = [h for h in root.handlers if getattr(h, "_qsource_console", False)]
        assert len(consoles) == 1
        assert root.level == logging.ERROR
        assert second is None
        assert first.run_id == "run-a"
    finally:
        root.removeHandler(first)
        first.close()
        for h in consoles:
            root.removeHandler(h)
        for h in before:
            root.addHandler(h)
        root.setLevel(level)
