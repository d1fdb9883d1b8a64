"""Utility functions for SLLG."""

from .artifacts import ArtifactWriter, dumps, ledger_text, series_rows, series_text, table_text

__all__ = [
    "ArtifactWriter",
    "dumps",
    "series_rows",
    "series_text",
    "table_text",
    "ledger_text",
]
