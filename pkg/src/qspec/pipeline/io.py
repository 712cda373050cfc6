"""CSV ingestion, log-returns and the long-format field CSV."""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from contextlib import contextmanager

import numpy as np

from ..core import SpectralField, check_quantiles
from ..errors import DomainError, ParseError

FIELD_HEADER = ("t0", "omega", "tau1", "tau2", "re", "im")


@contextmanager
def atomic_write(path, mode: str = "w", **kwargs):
    """Write to a temporary sibling of ``path`` and rename it into place on success."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix="." + os.path.basename(path) + ".")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    try:
        with os.fdopen(fd, mode, **kwargs) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def ingest_csv(path, column: int | str = 0) -> np.ndarray:
    """Read one numeric column; a non-numeric first row is taken as a header.

    ``column`` is a 0-based index, or a header name.
    """
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), 1) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: file is empty")
    header = None
    first = rows[0][1]
    if isinstance(column, str):
        header = [c.strip() for c in first]
        if column not in header:
            raise ParseError(f"{path}: no column named {column!r} in header {header}")
        col = header.index(column)
        rows = rows[1:]
    else:
        col = int(column)
        if col < len(first) and not _is_number(first[col].strip()):
            rows = rows[1:]
    values = []
    for lineno, row in rows:
        if col >= len(row):
            raise ParseError(f"{path}: row {lineno} has no column {col + 1}")
        cell = row[col].strip()
        try:
            v = float(cell)
        except ValueError:
            raise ParseError(f"{path}: cannot parse {cell!r} at row {lineno}, "
                             f"column {col + 1}") from None
        if not math.isfinite(v):
            raise ParseError(f"{path}: non-finite value {cell!r} at row {lineno}, column {col + 1}")
        values.append(v)
    if not values:
        raise ParseError(f"{path}: no data rows")
    return np.array(values)


def log_returns(prices) -> np.ndarray:
    """``log(p_{t+1}) - log(p_t)``; prices must be strictly positive."""
    p = np.asarray(prices, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise DomainError("need at least two prices")
    bad = np.flatnonzero(~(p > 0))
    if bad.size:
        raise DomainError(f"non-positive price {p[bad[0]]} at index {bad[0] + 1}")
    return np.diff(np.log(p))


def write_series(x, path) -> None:
    with atomic_write(path, newline="") as fh:
        fh.write("x\n")
        for v in np.asarray(x, dtype=np.float64):
            fh.write(_fmt(v) + "\n")


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def export_field(field: SpectralField, path) -> None:
    """Long-format CSV, one row per ``(t0, omega, tau1, tau2)`` in lexicographic order."""
    buf = io.StringIO()
    buf.write(",".join(FIELD_HEADER) + "\n")
    taus = [_fmt(t) for t in field.quantiles]
    for i, t0 in enumerate(field.t0_grid):
        for j, w in enumerate(field.freqs):
            ws = _fmt(w)
            block = field.values[i, j]
            for a, ta in enumerate(taus):
                for b, tb in enumerate(taus):
                    v = block[a, b]
                    buf.write(f"{t0},{ws},{ta},{tb},{_fmt(v.real)},{_fmt(v.imag)}\n")
    with atomic_write(path, newline="") as fh:
        fh.write(buf.getvalue())


def import_field(path, plan=None) -> SpectralField:
    """Inverse of :func:`export_field`.  ``plan``, if given, is attached after a grid check."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty") from None
        if tuple(h.strip() for h in header) != FIELD_HEADER:
            raise ParseError(f"{path}: expected header {','.join(FIELD_HEADER)}")
        recs = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                recs.append((int(row[0]), float(row[1]), float(row[2]), float(row[3]),
                             float(row[4]), float(row[5])))
            except (ValueError, IndexError):
                raise ParseError(f"{path}: malformed row {lineno}") from None
    if not recs:
        raise ParseError(f"{path}: no data rows")
    t0s = sorted({r[0] for r in recs})
    ws = sorted({r[1] for r in recs})
    taus = sorted({r[2] for r in recs} | {r[3] for r in recs})
    ti = {t: i for i, t in enumerate(t0s)}
    wi = {w: i for i, w in enumerate(ws)}
    qi = {q: i for i, q in enumerate(taus)}
    values = np.full((len(t0s), len(ws), len(taus), len(taus)), np.nan, dtype=np.complex128)
    for t0, w, a, b, re, im in recs:
        values[ti[t0], wi[w], qi[a], qi[b]] = complex(re, im)
    if np.isnan(values).any():
        raise ParseError(f"{path}: incomplete grid")
    field = SpectralField(values, tuple(t0s), np.array(ws), check_quantiles(taus), None)
    if plan is not None:
        ref = SpectralField.from_plan(values, plan)
        if not ref.same_grid(field):
            raise ParseError(f"{path}: grid does not match the supplied plan")
        field = ref
    return field
