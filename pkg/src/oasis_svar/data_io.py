"""CSV ingestion and full-precision CSV writing."""

from __future__ import annotations

import csv
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    FileNotFound,
    NonFiniteValue,
    NonPositiveValueUnderLog,
    OasisError,
    RaggedRows,
    UnknownVariable,
)
from .var_engine import TRANSFORMS, TimeSeriesPanel

LABEL_HEADERS = {"", "date", "period", "time", "index", "quarter", "month"}


def _parse(cell: str) -> float:
    cell = cell.strip()
    if cell == "":
        return math.nan
    return float(cell)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_table(path) -> tuple[list, list, dict]:
    """Read a comma-separated file with a header row.

    Returns (column names, period labels, {column: list of raw cells}). The
    first column is treated as period labels when its header is blank or a
    conventional date name, or when any of its cells is not numeric.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFound(f"data file not found: {path}")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    if not rows:
        raise OasisError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise RaggedRows(f"{path}: line {lineno} has {len(r)} fields, header has {len(header)}")
    first = [r[0] for r in body]
    has_labels = header[0].lower() in LABEL_HEADERS or not all(_is_number(c) or not c.strip() for c in first)
    if has_labels:
        labels = [c.strip() for c in first]
        names = header[1:]
        cols = {h: [r[i + 1] for r in body] for i, h in enumerate(names)}
    else:
        labels = [str(i + 1) for i in range(len(body))]
        names = header
        cols = {h: [r[i] for r in body] for i, h in enumerate(names)}
    return names, labels, cols


def _variables(config) -> list:
    specs = getattr(config, "variables", config)
    out = []
    for spec in specs:
        if isinstance(spec, str):
            out.append((spec, "levels"))
        else:
            name, transform = spec
            out.append((str(name), str(transform)))
    return out


def _column(path, cols, labels, name) -> np.ndarray:
    if name not in cols:
        raise UnknownVariable(f"{path}: variable {name!r} not in header {sorted(cols)}")
    values = np.empty(len(labels))
    for i, cell in enumerate(cols[name]):
        try:
            values[i] = _parse(cell)
        except ValueError:
            raise NonFiniteValue(
                f"{path}: row {labels[i]!r} (line {i + 2}), column {name!r}: cannot parse {cell!r}"
            ) from None
    return values


def ingest_csv(path, config, extra: Sequence[str] = ()) -> TimeSeriesPanel:
    """Load the configured variables and apply their transforms.

    ``config`` is a StudyConfig or a sequence of (name, transform) pairs.
    When any variable is differenced the first row is dropped for all of
    them so the panel stays aligned. ``extra`` columns are loaded in levels
    and appended after the configured variables.
    """
    names, labels, cols = read_table(path)
    specs = _variables(config) + [(e, "levels") for e in extra]
    differenced = any(t != "levels" for _, t in specs)
    start = 1 if differenced else 0
    out = []
    for name, transform in specs:
        if transform not in TRANSFORMS:
            raise OasisError(f"variable {name!r}: unknown transform {transform!r}, expected one of {TRANSFORMS}")
        x = _column(path, cols, labels, name)
        if transform == "log-diff":
            bad = np.flatnonzero(np.isfinite(x) & ~(x > 0))
            if bad.size:
                i = int(bad[0])
                raise NonPositiveValueUnderLog(
                    f"{path}: row {labels[i]!r} (line {i + 2}), column {name!r}: value {x[i]!r} is not positive"
                )
            x = np.diff(np.log(x))
        elif transform == "diff":
            x = np.diff(x)
        else:
            x = x[start:]
        bad = np.flatnonzero(~np.isfinite(x))
        if bad.size:
            i = int(bad[0]) + start
            raise NonFiniteValue(f"{path}: row {labels[i]!r} (line {i + 2}), column {name!r}: missing or non-finite value")
        out.append(x)
    data = np.column_stack(out) if out else np.empty((len(labels) - start, 0))
    return TimeSeriesPanel(
        names=tuple(n for n, _ in specs),
        data=data,
        transforms=tuple(t for _, t in specs),
        index=tuple(labels[start:]),
    )


def fmt_full(x) -> str:
    """Shortest round-trip representation of a float."""
    if x is None:
        return "undefined"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_full(v) for v in row))
    return "\n".join(lines) + "\n"


def matrix_csv(M: np.ndarray, row_names: Sequence[str], col_names: Sequence[str], corner: str = "") -> str:
    M = np.atleast_2d(np.asarray(M))
    return csv_text([corner, *col_names], ([r, *M[i]] for i, r in enumerate(row_names)))


def read_matrix_csv(path) -> tuple[list, list, np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    cols = rows[0][1:]
    names = [r[0] for r in rows[1:]]
    return names, cols, np.array([[float(c) for c in r[1:]] for r in rows[1:]])
