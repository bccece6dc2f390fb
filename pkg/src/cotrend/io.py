"""Reading panels and restriction matrices from delimited text files."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np

from cotrend.cca import SeriesPanel
from cotrend.errors import DataError, DimensionError

MISSING = {"", "na", "nan", "n/a", ".", "null", "none", "#n/a"}


def _delimiter(first_line: str) -> str:
    return "\t" if "\t" in first_line else ","


def _read_rows(path) -> list[tuple[int, list[str]]]:
    text = Path(path).read_text()
    lines = text.splitlines()
    content = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not content:
        raise DataError(f"{path}: file is empty")
    delim = _delimiter(content[0])
    rows = []
    for lineno, row in enumerate(csv.reader(lines, delimiter=delim), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        rows.append((lineno, [c.strip() for c in row]))
    return rows


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return cell.lower() not in MISSING


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_panel(path) -> SeriesPanel:
    """Parse a delimited file with a header row into a panel.

    A leading column is treated as a date/index column when any of its data
    cells is non-numeric. Missing values are errors.
    """
    rows = _read_rows(path)
    (_, header), body = rows[0], rows[1:]
    if all(_is_number(c) for c in header):
        raise DataError("first row must be a header", row=rows[0][0])
    if not body:
        raise DataError(f"{path}: no data rows")
    width = len(header)
    for lineno, row in body:
        if len(row) != width:
            raise DataError(f"expected {width} fields, found {len(row)}", row=lineno)

    has_index = any(
        not _is_number(row[0]) and row[0].lower() not in MISSING for _, row in body
    )
    start = 1 if has_index else 0
    labels = header[start:]
    if len(labels) < 2:
        raise DataError(f"need at least 2 numeric columns, found {len(labels)}")
    values = np.empty((len(body), len(labels)))
    for r, (lineno, row) in enumerate(body):
        for c, cell in enumerate(row[start:]):
            if cell.lower() in MISSING:
                raise DataError("missing value", row=lineno, column=labels[c])
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise DataError(f"cannot parse {cell!r} as a number", row=lineno, column=labels[c]) from None
            if not np.isfinite(values[r, c]):
                raise DataError(f"non-finite value {cell!r}", row=lineno, column=labels[c])
    index = tuple(row[0] for _, row in body) if has_index else None
    return SeriesPanel(values, tuple(labels), index)


def preprocess(panel: SeriesPanel, *, log: bool = False, normalize_start: bool = False) -> SeriesPanel:
    """Optionally take natural logs, then subtract each column's first value."""
    values = np.array(panel.values)
    if log:
        if np.any(values <= 0):
            r, c = np.argwhere(values <= 0)[0]
            raise DataError("log of a non-positive value", row=int(r) + 1, column=panel.labels[c])
        values = np.log(values)
    if normalize_start:
        values = values - values[0]
    return SeriesPanel(values, panel.labels, panel.index)


def write_panel(path, panel: SeriesPanel, delimiter: str = ",") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        head = (["date"] if panel.index is not None else []) + list(panel.labels)
        w.writerow(head)
        for t in range(panel.T):
            lead = [panel.index[t]] if panel.index is not None else []
            w.writerow(lead + [repr(float(v)) for v in panel.values[t]])


def load_matrix(path, p: int | None = None) -> np.ndarray:
    """Read a numeric matrix (rows = variables, columns = restrictions)."""
    rows = _read_rows(path)
    if len({len(row) for _, row in rows}) != 1:
        raise DimensionError(f"{path}: rows have different lengths")
    try:
        M = np.array([[float(c) for c in row] for _, row in rows])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if p is not None and M.shape[0] != p:
        raise DimensionError(f"{path}: matrix has {M.shape[0]} rows, panel has p={p}")
    return M
