"""CSV files for paths, ensembles and result tables.

A path file has the header ``t,v1,...,vd``; an ensemble file adds a leading ``path_id``
column and stores the paths one after another. Reals are written with 17 significant
digits so that a file reproduces the arrays it was written from bit for bit.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np

from pathcalc.core.common.exceptions import ConfigError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.paths import SamplePath

logger = StructuredLogger(__name__)

REAL_FORMAT = "%.17g"


def _path_header(dim: int) -> list[str]:
    return ["t", *(f"v{k}" for k in range(1, dim + 1))]


def _read_table(source: str | Path) -> tuple[list[str], np.ndarray]:
    location = Path(source)
    if not location.is_file():
        raise ConfigError("path", f"no such file: {location}")
    with location.open(encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        rows = np.loadtxt(handle, delimiter=",", ndmin=2)
    if rows.size == 0:
        raise ConfigError("path", f"{location} holds no rows")
    if rows.shape[1] != len(header):
        raise ConfigError("path", f"{location}: {rows.shape[1]} columns for {len(header)} names")
    return header, rows


def write_table(
    target: str | Path, columns: Sequence[str], rows: np.ndarray | Sequence[Sequence[float]]
) -> Path:
    """Write a numeric table with a header line."""
    location = Path(target)
    location.parent.mkdir(parents=True, exist_ok=True)
    table = np.asarray(rows, dtype=np.float64)
    if table.ndim != 2 or table.shape[1] != len(columns):
        raise ValueError(f"table of shape {table.shape} does not match {len(columns)} columns")
    np.savetxt(
        location, table, fmt=REAL_FORMAT, delimiter=",", header=",".join(columns), comments=""
    )
    return location


def write_records(target: str | Path, records: Iterable[Mapping[str, float]]) -> Path:
    """Write dict rows sharing the same keys, in first-row key order."""
    rows = list(records)
    if not rows:
        raise ValueError("no records to write")
    columns = list(rows[0])
    return write_table(target, columns, [[float(row[key]) for key in columns] for row in rows])


def write_path(target: str | Path, path: SamplePath) -> Path:
    """Write one path as ``t,v1,...,vd``."""
    rows = np.column_stack([path.times, path.values])
    location = write_table(target, _path_header(path.dim), rows)
    logger.debug("Path written", path=str(location), points=len(path))
    return location


def read_path(source: str | Path) -> SamplePath:
    """Read a single-path file.

    Raises:
        ConfigError: If the file is missing, empty or has a malformed header.
    """
    header, rows = _read_table(source)
    if header[0] != "t" or len(header) < 2:
        raise ConfigError("path", f"expected header t,v1,...; got {','.join(header)}")
    return SamplePath(rows[:, 0], rows[:, 1:])


def write_ensemble(target: str | Path, paths: Iterable[SamplePath]) -> Path:
    """Write paths with a leading ``path_id`` column."""
    blocks = []
    dim = None
    for index, path in enumerate(paths):
        dim = path.dim if dim is None else dim
        if path.dim != dim:
            raise ValueError("ensemble paths must share a dimension")
        ids = np.full(len(path), float(index))
        blocks.append(np.column_stack([ids, path.times, path.values]))
    if dim is None:
        raise ValueError("empty ensemble")
    location = write_table(target, ["path_id", *_path_header(dim)], np.vstack(blocks))
    logger.debug("Ensemble written", path=str(location), paths=len(blocks))
    return location


def read_ensemble(source: str | Path) -> list[SamplePath]:
    """Read an ensemble file, or a single-path file as a one-path ensemble."""
    header, rows = _read_table(source)
    if header[0] == "t":
        return [SamplePath(rows[:, 0], rows[:, 1:])]
    if header[:2] != ["path_id", "t"] or len(header) < 3:
        raise ConfigError("path", f"expected header path_id,t,v1,...; got {','.join(header)}")
    ids = rows[:, 0].astype(np.int64)
    cuts = np.flatnonzero(np.diff(ids)) + 1
    return [SamplePath(block[:, 1], block[:, 2:]) for block in np.split(rows, cuts)]
