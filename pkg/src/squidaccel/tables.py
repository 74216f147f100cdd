"""Column tables written out as plot-ready CSV."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SweepTable", "format_value"]


def format_value(value, precision: int = 12) -> str:
    """Fixed formatting: ``precision`` significant digits in exponent form,
    empty string for missing values."""
    if value is None:
        return ""
    if isinstance(value, (str, np.str_)):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    x = float(value)
    if math.isnan(x):
        return ""
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.{precision - 1}e}"


@dataclass
class SweepTable:
    """Named, equal-length columns with a unit per column.

    The first column is the sweep variable and must be strictly increasing.
    ``failures`` lists ``(row, message)`` pairs for rows whose value could
    not be computed; those rows keep their place with empty cells.
    """

    columns: dict
    units: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
        first = np.asarray(next(iter(self.columns.values())), dtype=float)
        if first.size > 1 and not np.all(np.diff(first) > 0):
            raise ValueError("sweep column must be strictly increasing")

    def __len__(self) -> int:
        return len(next(iter(self.columns.values())))

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def header(self) -> list:
        return [f"{name}[{self.units[name]}]" if self.units.get(name) else name
                for name in self.columns]

    def rows(self):
        cols = list(self.columns.values())
        for i in range(len(self)):
            yield [c[i] for c in cols]

    def to_csv(self, stream, precision: int = 12) -> None:
        stream.write(",".join(self.header) + "\n")
        for row in self.rows():
            stream.write(",".join(format_value(v, precision) for v in row) + "\n")
