import json
import logging

import pytest
from click.testing import CliRunner

from qsource import __version__
from qsource.__main__ import cli
from qsource.config import ExperimentConfig
from qsource.report import format_value, render_csv
from qsource.runner import ScenarioResult

BERNOULLI = {"kind": "bernoulli", "rho": [[0.75, 0], [0, 0.25]]}


@pytest.fixture(autouse=True)
def _drop_console_handlers():
    yield
    root = logging.getLogger()
    for h in [h for h in root.handlers if getattr(h, "_qsource_console", False)]:
        root.removeHandler(h)


def _write(tmp_path, doc, name="exp.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_version():
    result = CliRunner().invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_scenario_command_writes_reports(tmp_path):
    cfg = _write(tmp_path, {"scenario": "entropy-scan", "source": BERNOULLI, "n_max": 3})
    out = tmp_path / "out"
    result = CliRunner().invoke(cli, ["entropy-scan", "--config", cfg, "--out", str(out)])

    assert result.exit_code == 0, result.output
    assert "all invariants passed" in result.output
    csv_text = (out / "results.csv").read_text()
    assert csv_text.startswith(f"# qsource-lab {__version__} scenario=entropy-scan\n")
    assert "n,block_entropy,ratio,difference,closed_form\n" in csv_text
    summary = json.loads((out / "summary.json").read_text())
    assert summary["rows"] == 3
    assert summary["all_passed"] is True
    events = (out / "events.jsonl").read_text().splitlines()
    assert any(json.loads(e)["scenario"] == "entropy-scan" for e in events)


def test_reports_are_byte_identical_across_runs(tmp_path):
    doc = {"scenario": "aep", "source": BERNOULLI, "n_values": [6, 8], "samples": 50, "seed": 9}
    cfg = _write(tmp_path, doc)
    runner = CliRunner()
    for name in ("a", "b"):
        result = runner.invoke(cli, ["run", "--config", cfg, "--out", str(tmp_path / name)])
        assert result.exit_code == 0, result.output
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_certify_runs_without_config(tmp_path):
    result = CliRunner().invoke(cli, ["certify-appendix", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    rows = (tmp_path / "results.csv").read_text().splitlines()
    assert rows[-1].startswith("0,0.05,0.05,")


def test_invalid_config_exits_2(tmp_path):
    cfg = _write(tmp_path, {"scenario": "aep"})
    result = CliRunner().invoke(cli, ["run", "--config", cfg, "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "needs a source" in result.output


def test_unreadable_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    result = CliRunner().invoke(cli, ["positivity", "--config", str(bad)])
    assert result.exit_code == 2
    assert "not valid JSON" in result.output


def test_run_requires_config():
    result = CliRunner().invoke(cli, ["run"])
    assert result.exit_code == 2


def test_invalid_source_exits_2(tmp_path):
    doc = {"scenario": "positivity", "source": {"kind": "bernoulli", "rho": [[0.5, 0], [0, 0.6]]}}
    result = CliRunner().invoke(cli, ["run", "--config", _write(tmp_path, doc), "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "trace" in result.output


def test_budget_exceeded_exits_3(tmp_path):
    cfg = _write(tmp_path, {"scenario": "positivity", "source": BERNOULLI, "n_max": 8})
    result = CliRunner().invoke(
        cli, ["positivity", "--config", cfg, "--max-dim", "64", "--out", str(tmp_path)]
    )
    assert result.exit_code == 3
    assert "--max-dim" in result.output


def test_seed_override_lands_in_summary(tmp_path):
    cfg = _write(tmp_path, {"scenario": "consistency", "source": BERNOULLI, "n_max": 2})
    result = CliRunner().invoke(cli, ["consistency", "--config", cfg, "--seed", "17", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert json.loads((tmp_path / "summary.json").read_text())["seed"] == 17


def test_schema_command():
    result = CliRunner().invoke(cli, ["schema"])
    assert result.exit_code == 0
    schema = json.loads(result.output)
    assert "scenario" in schema["properties"]


def test_empty_result_renders_header_only():
    result = ScenarioResult(
        scenario="aep", columns=[("n", "block length"), ("atypical_mass", "μ(U)")]
    )
    text = render_csv(result, "0.1.0")
    lines = text.splitlines()
    assert lines[0] == "# qsource-lab 0.1.0 scenario=aep"
    assert lines[-1] == "n,atypical_mass"
    assert not [l for l in lines if not l.startswith("#")][1:]


def test_format_value():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(3) == "3"
    assert format_value(0.1 + 0.2) == "0.3"
    assert format_value(float("inf")) == "inf"
    assert format_value(float("nan")) == "nan"
    assert format_value("closed-form") == "closed-form"


def test_summary_keeps_config(tmp_path):
    from qsource.report import emit_report
    from qsource.runner import run_experiment

    cfg = ExperimentConfig(scenario="positivity", source=BERNOULLI, n_max=2)
    csv_path, summary_path = emit_report(run_experiment(cfg, workers=1), tmp_path, cfg, "x")
    summary = json.loads(summary_path.read_text())
    assert summary["config"]["source"]["kind"] == "bernoulli"
    assert summary["invariants"][0]["name"] == "positivity"
    assert csv_path.name == "results.csv"
