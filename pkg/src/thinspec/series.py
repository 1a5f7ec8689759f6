"""Sampled observable trajectories and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    """Round-trip float formatting used by every CSV writer (deterministic)."""
    if isinstance(value, (str, bytes)):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    # fold -0.0 so sign-of-zero noise never reaches the files
    return format(x + 0.0 if x == 0 else x, ".17g")


@dataclass
class TimeSeries:
    """Scalar observables sampled on a common time grid.

    ``columns`` maps a column name to an array of the same length as ``t``;
    ``units`` gives the unit string written into the CSV header.
    """

    t: np.ndarray
    columns: dict = field(default_factory=dict)
    units: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name, values in self.columns.items():
            if len(values) != len(self.t):
                raise ValueError(f"column {name!r} has {len(values)} samples, expected {len(self.t)}")

    def __len__(self):
        return len(self.t)

    def __getitem__(self, name):
        if name == "t":
            return self.t
        return self.columns[name]

    def add(self, name: str, values, unit: str = "1") -> None:
        values = np.asarray(values)
        if len(values) != len(self.t):
            raise ValueError(f"column {name!r} has {len(values)} samples, expected {len(self.t)}")
        self.columns[name] = values
        self.units[name] = unit

    def header(self, time_unit: str = "time") -> list[str]:
        return [f"t [{time_unit}]"] + [f"{k} [{self.units.get(k, '1')}]" for k in self.columns]

    def to_csv(self, path=None, time_unit: str = "time") -> str:
        """Write comma-separated values with a header row; returns the text."""
        rows = [self.header(time_unit)]
        cols = list(self.columns.values())
        for i, ti in enumerate(self.t):
            rows.append([fmt(ti)] + [fmt(c[i]) for c in cols])
        return write_rows(rows, path)


def write_rows(rows, path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a CSV written by this package into name -> array (units stripped)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = list(reader)
    names = [h.split(" [")[0] for h in header]
    out = {}
    for j, name in enumerate(names):
        col = [row[j] for row in data]
        try:
            out[name] = np.array([float(x) for x in col])
        except ValueError:
            out[name] = np.array(col)
    return out
