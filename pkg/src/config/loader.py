"""Flat ``key = value`` configuration files and command-line overrides."""

import json
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.core.exceptions import ConfigurationError
from src.core.logging import get_logger
from src.models.config import SimConfig

logger = get_logger(__name__)


def parse_value(text: str) -> Any:
    """JSON literal when possible (numbers, booleans, null, lists), else the raw string."""
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_assignment(line: str) -> tuple[str, Any]:
    """Split ``key = value`` into a dotted key and a parsed value."""
    if "=" not in line:
        raise ConfigurationError(f"Expected 'key = value', got {line!r}")
    key, value = line.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigurationError(f"Missing key in {line!r}")
    return key, parse_value(value)


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Read a flat config file; blank lines and ``#`` comments are ignored."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
    entries: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            key, value = parse_assignment(line)
        except ConfigurationError as e:
            raise ConfigurationError(f"{path}:{number}: {e}") from e
        entries[key] = value
    return entries


def nest(entries: Mapping[str, Any]) -> dict[str, Any]:
    """Turn dotted keys into nested section dictionaries.

    ``initial.params.<name>`` keys are collected into the params mapping.
    """
    nested: dict[str, Any] = {}
    for key, value in entries.items():
        parts = key.split(".")
        if len(parts) < 2:
            raise ConfigurationError(f"Config key {key!r} has no section")
        section = nested.setdefault(parts[0], {})
        if not isinstance(section, dict):
            raise ConfigurationError(f"Config key {key!r} conflicts with section {parts[0]!r}")
        if parts[:2] == ["initial", "params"] and len(parts) > 2:
            section.setdefault("params", {})[".".join(parts[2:])] = value
        elif len(parts) == 2:
            section[parts[1]] = value
        else:
            raise ConfigurationError(f"Config key {key!r} is nested too deeply")
    return nested


def load_config(
    path: str | Path | None = None,
    overrides: Iterable[str] = (),
    seed: int | None = None,
) -> SimConfig:
    """Resolve the configuration of a run.

    File entries are applied first, then ``--set key=value`` overrides, then
    ``--seed``.

    Args:
        path: Optional flat config file
        overrides: ``key=value`` strings
        seed: Overrides ``ensemble.master_seed``

    Returns:
        The validated SimConfig

    Raises:
        ConfigurationError: On unreadable files, malformed lines, unknown keys
            or values that fail validation
    """
    entries: dict[str, Any] = read_config_file(path) if path is not None else {}
    for override in overrides:
        key, value = parse_assignment(override)
        entries[key] = value
    if seed is not None:
        entries["ensemble.master_seed"] = seed
    try:
        config = SimConfig.model_validate(nest(entries))
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
    logger.debug(f"Resolved configuration with {len(entries)} explicit entries")
    return config
