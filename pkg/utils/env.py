"""Env helpers used by the CLI and the metering factory.

Environment variables only tune ambient behaviour (threads, metering, log
level); nothing read here changes a computed number.
"""

import logging
import os

log = logging.getLogger(__name__)

_UNSET = {"", "null", "none", "false", "auto"}


def int_env(var: str, default: int | None = None) -> int | None:
    """Read $VAR as a positive int.
    • '', 'null', 'none', 'false', 'auto'  -> None
    • invalid / non-positive -> default
    """
    val = os.getenv(var)
    if val is None:
        return default
    val = val.strip().lower()
    if val in _UNSET:
        return None
    try:
        num = int(val)
    except ValueError:
        log.warning("%s=%s is not a valid int; using default=%s", var, val, default)
        return default
    return num if num > 0 else default


def choice_env(var: str, choices: set[str], default: str) -> str:
    """Read $VAR lower-cased, falling back to ``default`` when not in ``choices``."""
    val = (os.getenv(var) or "").strip().lower()
    if not val:
        return default
    if val not in choices:
        log.warning(
            "%s=%s is not one of %s; using %s", var, val, sorted(choices), default
        )
        return default
    return val
