"""
CLI entry point - one subcommand per scenario
"""
from __future__ import annotations

import json
import logging
import uuid
from pathlib import Path

import click
from pydantic import ValidationError

from logs import LogLevel

from . import __version__


class ConfigError(click.ClickException):
    exit_code = 2


class BudgetError(click.ClickException):
    exit_code = 3


SCENARIO_HELP = {
    "consistency": "Boundary partial traces of Π_n against Π_{n−1}.",
    "positivity": "Smallest eigenvalue of every Π_n up to n_max.",
    "entropy-scan": "Block entropies H_n, rate estimators and their bounds.",
    "bound-check": "Measured-entropy, Jensen and Klein inequalities.",
    "aep": "Typical sets, typical subspaces and expectation preservation.",
    "ergodicity": "Finite-window time averages, quantum and classical.",
    "certify-appendix": "Sufficient positivity threshold for Pauli sources.",
}


def _run_options(fn):
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(dir_okay=False),
            help="Experiment JSON document",
        ),
        click.option(
            "--out",
            type=click.Path(file_okay=False),
            help="Output directory (default: config output or ./reports)",
        ),
        click.option("--seed", type=int, help="Override the config seed"),
        click.option("--max-dim", type=int, help="Override budgets.max_dim (limit on d**n)"),
        click.option(
            "--max-words", type=int, help="Override budgets.max_words (limit on r**n)"
        ),
        click.option(
            "--log-level",
            type=click.Choice([lvl.value for lvl in LogLevel]),
            help="Console and events log level (default: $QSOURCE_LOG_LEVEL or info)",
        ),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _load_raw(config_path: str | None) -> dict:
    if config_path is None:
        return {}
    try:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"❌ cannot read config {config_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"❌ {config_path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"❌ {config_path} must hold a JSON object")
    return raw


def _build_config(scenario: str | None, config_path: str | None, seed, max_dim, max_words):
    from .config import ExperimentConfig

    raw = _load_raw(config_path)
    if scenario is not None:
        raw["scenario"] = scenario
    if seed is not None:
        raw["seed"] = seed
    budgets = dict(raw.get("budgets") or {})
    if max_dim is not None:
        budgets["max_dim"] = max_dim
    if max_words is not None:
        budgets["max_words"] = max_words
    if budgets:
        raw["budgets"] = budgets
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"❌ invalid experiment config\n\n{exc}") from exc


def _execute(scenario: str | None, config_path, out, seed, max_dim, max_words, log_level) -> None:
    cfg = _build_config(scenario, config_path, seed, max_dim, max_words)

    from logs import configure_logging
    from measurement import InvalidPom
    from sources import InvalidSource
    from usage import export_metrics, get_meter
    from utils.budget import BudgetExceeded
    from utils.env import choice_env

    from .report import emit_report
    from .runner import run_experiment

    out_dir = Path(out or cfg.output or "reports")
    level = log_level or choice_env(
        "QSOURCE_LOG_LEVEL", {lvl.value for lvl in LogLevel}, LogLevel.info.value
    )
    handler = configure_logging(
        level, out_dir / "events.jsonl", uuid.uuid4().hex[:12], cfg.scenario.value
    )
    meter = get_meter()
    try:
        result = run_experiment(cfg, meter=meter)
        csv_path, summary_path = emit_report(result, out_dir, cfg, __version__)
        export_metrics(meter, out_dir / "metrics.prom")
    except BudgetExceeded as exc:
        flag = exc.budget.replace("_", "-")
        raise BudgetError(f"❌ {exc}\n\n💡 Fix:\n   pass --{flag} or lower n") from exc
    except (InvalidSource, InvalidPom) as exc:
        raise ConfigError(f"❌ {exc}") from exc
    except (ValueError, RuntimeError, ArithmeticError, OSError) as exc:
        _friendly_exit(exc)
    finally:
        if handler is not None:
            logging.getLogger().removeHandler(handler)
            handler.close()

    status = "all invariants passed" if result.all_passed else "some invariants FAILED"
    click.echo(f"{cfg.scenario.value}: {len(result.rows)} rows, {status}")
    click.echo(f"  {csv_path}\n  {summary_path}")


def _friendly_exit(err: Exception):
    """Convert a domain failure to a clean user message (exit 1)."""
    msg = f"❌ {type(err).__name__}: {err}"
    if "positive" in str(err) or "singular" in str(err):
        msg += (
            "\n\n💡 The source left the positive cone; run the positivity or "
            "certify-appendix scenario to locate the failing block."
        )
    raise click.ClickException(msg)


@click.group()
@click.version_option(__version__, prog_name="qsource-lab")
def cli() -> None:
    """Numerical laboratory for quantum information sources."""


def _scenario_command(name: str) -> None:
    @cli.command(name, help=SCENARIO_HELP[name])
    @_run_options
    def command(config_path, out, seed, max_dim, max_words, log_level) -> None:
        _execute(name, config_path, out, seed, max_dim, max_words, log_level)


for _name in SCENARIO_HELP:
    _scenario_command(_name)


@cli.command("run")
@_run_options
def run(config_path, out, seed, max_dim, max_words, log_level) -> None:
    """Run the scenario named in the config document."""
    if config_path is None:
        raise ConfigError("❌ run needs --config")
    _execute(None, config_path, out, seed, max_dim, max_words, log_level)


@cli.command("schema")
def schema() -> None:
    """Print the JSON schema of the experiment document."""
    from .config import ExperimentConfig

    click.echo(json.dumps(ExperimentConfig.model_json_schema(), indent=2))


def main() -> None:
    """Run qsource-lab"""
    # Load .env file if it exists (for development)
    try:
        from dotenv import load_dotenv

        load_dotenv()
    except ImportError:
        pass  # python-dotenv not installed, that's OK
    cli()


if __name__ == "__main__":
    main()
