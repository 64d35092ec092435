"""Data ingestion and result serialization for the CLI.

Reports are JSON documents with a stable top-level shape
``{command, seed, config, results}``; density grids are written as sibling
CSV files with columns ``point, density, atom_c_mass, atom_d_mass`` (the
atom columns are constant; the grid starts at the lower bound and, when it
is finite, ends at the upper bound, so spike locations are the first and
last points).  Serialization is byte-deterministic for a fixed document.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from .analytic import DensityGrid

__all__ = [
    "parse_contingency_csv",
    "to_jsonable",
    "emit_report",
    "write_density_grid_csv",
]


def parse_contingency_csv(path: str | Path) -> np.ndarray:
    """Read a two-way table of nonnegative integer counts.

    Rows are comma-separated; a single non-numeric first row is treated as a
    header and skipped.  Ragged, negative, or non-integer cells raise with
    the offending row/column location (1-based, header included).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        raw = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if not raw:
        raise ValueError(f"{path}: no data rows")

    def _is_numeric_row(cells: list[str]) -> bool:
        try:
            [float(cell) for cell in cells]
            return True
        except ValueError:
            return False

    start = 0
    if not _is_numeric_row(raw[0]):
        start = 1
        if len(raw) == 1:
            raise ValueError(f"{path}: only a header row present")

    width = len(raw[start])
    table = []
    for r, cells in enumerate(raw[start:], start=start + 1):
        if len(cells) != width:
            raise ValueError(f"{path}: row {r} has {len(cells)} cells, expected {width}")
        row_vals = []
        for c, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError as exc:
                raise ValueError(f"{path}: row {r}, column {c}: {cell!r} is not a number") from exc
            if value < 0 or value != int(value):
                raise ValueError(
                    f"{path}: row {r}, column {c}: {cell!r} is not a nonnegative integer"
                )
            row_vals.append(int(value))
        table.append(row_vals)
    return np.asarray(table, dtype=int)


def to_jsonable(obj):
    """Recursively convert dataclasses / numpy values to JSON-ready types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and (obj != obj):  # NaN -> null
        return None
    return obj


def emit_report(document: dict, path: str | Path) -> None:
    """Write the report JSON; identical documents serialize byte-identically."""
    path = Path(path)
    try:
        text = json.dumps(to_jsonable(document), sort_keys=True, indent=2) + "\n"
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def write_density_grid_csv(grid: DensityGrid, path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["point", "density", "atom_c_mass", "atom_d_mass"])
            for point, dens in zip(grid.points, grid.density):
                writer.writerow([repr(float(point)), repr(float(dens)),
                                 repr(float(grid.atom_c_mass)), repr(float(grid.atom_d_mass))])
    except OSError as exc:
        raise OSError(f"cannot write density grid to {path}: {exc}") from exc
