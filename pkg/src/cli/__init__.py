"""CLI interface for SLLG."""

from .main import cli

__all__ = ["cli"]

