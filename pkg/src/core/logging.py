"""Structured logging to stderr; stdout carries command output only."""

import json
import logging
import sys
from typing import Any

from src.config import get_settings

# ``extra=`` keys copied into JSON records
CONTEXT_FIELDS = ("experiment", "check", "trajectory_id", "step", "t")

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_handler: logging.Handler | None = None


class JsonFormatter(logging.Formatter):
    """One JSON object per record, with run context when present."""

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, Any] = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        entry.update(
            {name: getattr(record, name) for name in CONTEXT_FIELDS if hasattr(record, name)}
        )
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


def setup_logging(level: str | None = None) -> None:
    """Install the stderr handler on the root logger.

    Args:
        level: Overrides ``settings.log_level`` for this process

    Repeated calls swap the handler from the previous call.
    """
    global _handler
    settings = get_settings()

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        JsonFormatter() if settings.log_format == "json" else logging.Formatter(TEXT_FORMAT)
    )

    root = logging.getLogger()
    if _handler is not None:
        root.removeHandler(_handler)
    root.setLevel(level or settings.log_level)
    root.addHandler(handler)
    _handler = handler


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name."""
    return logging.getLogger(name)
