"""Run artifacts: manifest, series, verdicts, ledger, tables and snapshots.

Every file is a pure function of the ExperimentResult and the resolved
config: keys are sorted, rows are ordered by trajectory id and floats are
written with ``repr``, so identical runs give byte-identical files.
"""

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from src.__version__ import __version__
from src.core.logging import get_logger
from src.flow.integrator import TrajectoryRecord
from src.models.config import SimConfig
from src.models.experiment import CheckResult, ExperimentResult
from src.torus.snapshot import write_snapshot

logger = get_logger(__name__)

SERIES_HEADER = ("traj_id", "t", "quantity", "value")
MANIFEST_EXCLUDED = ("output.dir",)


def json_default(value: Any) -> Any:
    """Convert numpy scalars and arrays, enums, paths and models for ``json.dumps``."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(data: Any, indent: int | None = 2) -> str:
    """Deterministic JSON: sorted keys, numpy-aware, NaN and Infinity allowed."""
    return json.dumps(data, sort_keys=True, indent=indent, default=json_default)


def format_value(value: Any) -> str:
    """CSV cell text; floats keep every digit via ``repr``."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, (list, tuple, dict)):
        return dumps(value, indent=None)
    return str(value)


def series_rows(records: Iterable[TrajectoryRecord]) -> list[tuple[int, float, str, float]]:
    """All (traj_id, t, quantity, value) rows, trajectories in id order."""
    ordered = sorted(records, key=lambda record: record.trajectory_id)
    return [row for record in ordered for row in record.rows()]


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def series_text(records: Iterable[TrajectoryRecord]) -> str:
    """Contents of series.csv."""
    return _csv_text(SERIES_HEADER, series_rows(records))


def table_text(rows: Sequence[dict[str, Any]]) -> str:
    """CSV of dict rows; columns in first-seen order across all rows."""
    columns: list[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    return _csv_text(columns, ([row.get(column) for column in columns] for row in rows))


def ledger_text(ledger: Iterable[dict[str, Any]]) -> str:
    """Contents of ledger.jsonl, one compact event per line."""
    return "".join(dumps(event, indent=None) + "\n" for event in ledger)


def verdicts_payload(verdicts: Sequence[CheckResult]) -> dict[str, Any]:
    return {
        "passed": all(verdict.passed for verdict in verdicts),
        "verdicts": {verdict.name: verdict.model_dump(mode="python") for verdict in verdicts},
    }


def manifest_payload(subcommand: str, config: SimConfig, extras: dict[str, Any]) -> dict[str, Any]:
    """Subcommand, code version, resolved config and experiment extras.

    ``output.dir`` is left out so that the same run written to two places
    has the same manifest.
    """
    flat = {key: value for key, value in config.flat().items() if key not in MANIFEST_EXCLUDED}
    return {"subcommand": subcommand, "version": __version__, "config": flat, "extras": extras}


def _finite(value: Any) -> Any:
    """Replace non-finite floats by strings so the manifest stays strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


class ArtifactWriter:
    """Writes one ExperimentResult below a run directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _write(self, name: str, text: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    def write(self, subcommand: str, config: SimConfig, result: ExperimentResult) -> list[Path]:
        """Write the artifacts of ``result`` selected by ``output.formats``.

        ``json`` covers verdicts and the ledger, ``csv`` the series and tables.
        The manifest and any snapshots are always written.

        Args:
            subcommand: Name echoed in the manifest
            config: Resolved configuration of the run
            result: Output of the experiment
        """
        formats = set(config.output.formats)
        extras = json.loads(dumps(_finite(result.extras)))
        written = [
            self._write("manifest.json", dumps(_finite(manifest_payload(subcommand, config, extras))))
        ]
        if "json" in formats:
            written.append(
                self._write("verdicts.json", dumps(_finite(verdicts_payload(result.verdicts))))
            )
        if "csv" in formats and result.records:
            written.append(self._write("series.csv", series_text(result.records)))
        if "json" in formats and (result.ledger or result.records):
            written.append(self._write("ledger.jsonl", ledger_text(result.ledger)))
        if "csv" in formats:
            for name, rows in sorted(result.tables.items()):
                if rows:
                    written.append(self._write(f"{name}.csv", table_text(rows)))
        for stem, field in sorted(result.snapshots.items()):
            written.append(write_snapshot(self.root / "snapshots" / f"{stem}.bin", field))
        logger.info(f"Wrote {len(written)} artifacts to {self.root}")
        return written
