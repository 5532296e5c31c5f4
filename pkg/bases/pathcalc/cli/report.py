"""Report emission: one JSON report plus CSV tables per experiment."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

from pathcalc.infrastructure.files import (
    SCHEMA,
    dumps,
    write_document,
    write_ensemble,
    write_path,
    write_table,
)

from .config import ExperimentConfig
from .experiments import ExperimentResult


def _sibling(base: Path, name: str, suffix: str) -> Path:
    return base.with_name(f"{base.stem}.{name}{suffix}")


def report_document(result: ExperimentResult, config: ExperimentConfig) -> dict[str, Any]:
    """The JSON body of a report, without the schema field."""
    return {
        "experiment": result.experiment,
        "status": result.status,
        "config": config.echo(),
        "summary": result.summary,
        "violations": result.violations,
        "seconds": result.seconds,
    }


def emit_report(result: ExperimentResult, config: ExperimentConfig) -> list[Path]:
    """Write the report files named by ``out`` and ``report``.

    ``out`` ending in ``.json`` receives the JSON report; any other ``out`` receives the
    main CSV (the output paths, or the first table). Further tables and documents are
    written next to it as ``<stem>.<name>.csv`` and ``<stem>.<name>.json``. With neither
    option set the JSON report goes to standard output.

    Raises:
        OSError: If an output location is not writable.
    """
    out = Path(config.out) if config.out else None
    json_target = Path(config.report) if config.report else None
    csv_target = out
    if out is not None and out.suffix == ".json":
        json_target = json_target or out
        csv_target = None
    anchor = csv_target or json_target
    written: list[Path] = []
    tables = dict(result.tables)

    if csv_target is not None:
        if result.paths is not None:
            if len(result.paths) == 1:
                written.append(write_path(csv_target, result.paths[0]))
            else:
                written.append(write_ensemble(csv_target, result.paths))
        elif tables:
            name = next(iter(tables))
            columns, rows = tables.pop(name)
            written.append(write_table(csv_target, columns, rows))
    if anchor is not None:
        for name, (columns, rows) in tables.items():
            if rows:
                written.append(write_table(_sibling(anchor, name, ".csv"), columns, rows))
        for name, document in result.documents.items():
            written.append(write_document(_sibling(anchor, name, ".json"), document))

    body = report_document(result, config)
    body["outputs"] = [str(path) for path in written]
    if json_target is not None:
        written.append(write_document(json_target, body))
    else:
        sys.stdout.write(dumps({"schema": SCHEMA, **body}))
    return written
