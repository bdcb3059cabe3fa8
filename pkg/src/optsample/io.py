"""CSV readers/writers for schedules, design measures, measurements and FRF estimates.

Floats are written with ``repr`` so files round-trip exactly and are
byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .estimator import FrfEstimate, SamplingSchedule
from .infodesign import DesignMeasure

__all__ = [
    "write_csv",
    "read_columns",
    "write_schedule",
    "read_schedule",
    "write_measure",
    "read_measure",
    "write_estimate",
    "write_measurements",
    "read_measurements",
]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows) -> None:
    """Write rows to ``path`` (or to a text stream); I/O errors name the path."""
    if hasattr(path, "write"):
        _write(path, header, rows)
        return
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            _write(fh, header, rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def read_columns(path):
    """Return ``(header, columns)``; header is ``None`` when the first row is numeric."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path} is empty")
    header = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from exc
    if data.size == 0:
        data = np.empty((0, len(header or [])))
    return header, data.T


def write_schedule(path, schedule: SamplingSchedule) -> None:
    write_csv(path, ["t"], ((t,) for t in schedule.times))


def read_schedule(path, horizon=None) -> SamplingSchedule:
    _, cols = read_columns(path)
    if cols.shape[0] < 1:
        raise ValueError(f"{path}: expected a column of sampling times")
    return SamplingSchedule.from_unsorted(cols[0], horizon)


def write_measure(path, measure: DesignMeasure) -> None:
    write_csv(path, ["time", "weight"], zip(measure.grid, measure.weights))


def read_measure(path, horizon=None) -> DesignMeasure:
    _, cols = read_columns(path)
    if cols.shape[0] != 2:
        raise ValueError(f"{path}: expected two columns (time, weight)")
    w = cols[1]
    return DesignMeasure(cols[0], w / w.sum(), horizon)


def write_estimate(path, estimate: FrfEstimate) -> None:
    write_csv(path, ["omega", "re", "im", "magnitude", "phase"], estimate.rows())


def write_measurements(path, times, y) -> None:
    write_csv(path, ["t", "y"], zip(times, y))


def read_measurements(path):
    """Return ``(times or None, y)`` from a ``t,y`` or single-column ``y`` file."""
    header, cols = read_columns(path)
    if cols.shape[0] == 1:
        return None, cols[0]
    if cols.shape[0] == 2:
        return cols[0], cols[1]
    raise ValueError(f"{path}: expected columns (t, y) or (y)")
