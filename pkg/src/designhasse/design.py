"""Design tables, factors and the partitions they induce on observational units."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class DesignError(ValueError):
    """Raised when a design table cannot be built from the given input."""


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding about a design or structure."""

    code: str
    message: str
    subject: str = ""

    def __str__(self) -> str:
        return f"warning [{self.code}]: {self.message}"


@dataclass(frozen=True)
class Factor:
    name: str
    levels: tuple[str, ...]
    is_random: bool = False

    def __post_init__(self):
        if not self.levels:
            raise DesignError(f"factor {self.name!r} has no levels")
        if len(set(self.levels)) != len(self.levels):
            raise DesignError(f"factor {self.name!r} has duplicate level labels")

    @property
    def n_levels(self) -> int:
        return len(self.levels)


class Partition:
    """Grouping of units into classes, stored as contiguous class ids.

    Class ids are renumbered in order of first appearance, so two partitions
    compare equal exactly when they group the units identically.
    """

    __slots__ = ("class_of", "n_classes", "_key")

    def __init__(self, labels: Iterable[int] | np.ndarray):
        labels = np.asarray(labels)
        if labels.ndim != 1:
            raise ValueError("partition labels must be one-dimensional")
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(order.size)
        class_of = rank[inverse].astype(np.int64)
        class_of.setflags(write=False)
        self.class_of = class_of
        self.n_classes = int(order.size)
        self._key = class_of.tobytes()

    @property
    def n_units(self) -> int:
        return int(self.class_of.size)

    def key(self) -> bytes:
        return self._key

    def is_discrete(self) -> bool:
        return self.n_classes == self.n_units

    def meet(self, other: "Partition") -> "Partition":
        """Common refinement: units share a class iff they share one in both."""
        if other.n_units != self.n_units:
            raise ValueError("partitions are over different numbers of units")
        return Partition(self.class_of * other.n_classes + other.class_of)

    def indicator(self) -> np.ndarray:
        """Unit-by-class 0/1 matrix."""
        x = np.zeros((self.n_units, self.n_classes))
        x[np.arange(self.n_units), self.class_of] = 1.0
        return x

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Partition(n_classes={self.n_classes}, n_units={self.n_units})"


@dataclass(frozen=True, eq=False)
class DesignTable:
    factors: tuple[Factor, ...]
    cells: np.ndarray = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, DesignTable):
            return NotImplemented
        return self.factors == other.factors and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.factors, self.cells.tobytes()))

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[1] != len(self.factors):
            raise DesignError("cell matrix must have one column per factor")
        if not self.factors:
            raise DesignError("a design needs at least one factor")
        if cells.shape[0] < 1:
            raise DesignError("a design needs at least one unit")
        names = [f.name for f in self.factors]
        if len(set(names)) != len(names):
            raise DesignError("duplicate factor names")
        for j, f in enumerate(self.factors):
            col = cells[:, j]
            if col.min() < 0 or col.max() >= f.n_levels:
                raise DesignError(f"level index out of range in factor {f.name!r}")
            if np.unique(col).size != f.n_levels:
                raise DesignError(f"factor {f.name!r} declares levels that never occur")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n_units(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.factors]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def random_flags(self) -> tuple[bool, ...]:
        return tuple(f.is_random for f in self.factors)

    def with_random_flags(self, flags: Sequence[bool]) -> "DesignTable":
        if len(flags) != self.n_factors:
            raise DesignError(
                f"random flags have length {len(flags)}, design has {self.n_factors} factors"
            )
        factors = tuple(
            Factor(f.name, f.levels, bool(r)) for f, r in zip(self.factors, flags)
        )
        return DesignTable(factors, self.cells)

    def labels(self, unit: int) -> list[str]:
        return [f.levels[c] for f, c in zip(self.factors, self.cells[unit])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.names)
        for i in range(self.n_units):
            writer.writerow(self.labels(i))
        return buf.getvalue()

    @classmethod
    def from_columns(cls, columns: dict[str, Sequence], random: Sequence[str] = ()) -> "DesignTable":
        """Build a table from named label columns (labels are stringified)."""
        names = list(columns)
        rows = list(zip(*(columns[n] for n in names)))
        return _from_rows(names, [[str(v) for v in r] for r in rows],
                          [n in set(random) for n in names])


def _from_rows(names, rows, flags) -> DesignTable:
    factors = []
    cols = []
    for j, name in enumerate(names):
        seen: dict[str, int] = {}
        col = [seen.setdefault(row[j], len(seen)) for row in rows]
        factors.append(Factor(name, tuple(seen), bool(flags[j])))
        cols.append(col)
    cells = np.array(cols, dtype=np.int64).T.reshape(len(rows), len(names))
    return DesignTable(tuple(factors), cells)


def load_design(csv_text: str, random_flags: Sequence[bool] | None = None) -> DesignTable:
    """Parse CSV text (header row of factor names) into a DesignTable.

    Levels are recoded to indices in order of first appearance. Labels are
    compared as trimmed strings, so ``"1"`` and ``"01"`` are distinct levels.
    Without ``random_flags`` every factor is fixed.
    """
    if csv_text.startswith("\ufeff"):
        csv_text = csv_text[1:]
    reader = csv.reader(io.StringIO(csv_text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise DesignError("empty CSV input")
    header = [h.strip() for h in rows[0]]
    body = [[c.strip() for c in r] for r in rows[1:]]
    if any(not h for h in header):
        raise DesignError("empty column name in header")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DesignError(f"duplicate column names: {', '.join(dupes)}")
    if not body:
        raise DesignError("design has a header but no rows")
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DesignError(f"row {i} has {len(r)} fields, expected {len(header)}")
        if any(c == "" for c in r):
            raise DesignError(f"row {i} has a missing value")
    if random_flags is None:
        random_flags = [False] * len(header)
    elif len(random_flags) != len(header):
        raise DesignError(
            f"random flags have length {len(random_flags)}, design has {len(header)} columns"
        )
    return _from_rows(header, body, list(random_flags))


def read_flags_sidecar(text: str, names: Sequence[str]) -> list[bool]:
    """Parse ``name=0|1`` lines into a flag vector ordered like ``names``.

    Factors not mentioned are fixed. Unknown names are an error.
    """
    flags = {n: False for n in names}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DesignError(f"flags line {lineno}: expected name=0|1")
        name, value = (s.strip() for s in line.rsplit("=", 1))
        if name not in flags:
            raise DesignError(f"flags line {lineno}: unknown factor {name!r}")
        if value not in ("0", "1"):
            raise DesignError(f"flags line {lineno}: value must be 0 or 1")
        flags[name] = value == "1"
    return [flags[n] for n in names]


def write_flags_sidecar(table: DesignTable) -> str:
    return "".join(f"{f.name}={int(f.is_random)}\n" for f in table.factors)


def partition_of(table: DesignTable, subset: Iterable[int]) -> Partition:
    """Partition of units by their level combination on ``subset``.

    The empty subset gives the single-class partition (the Mean).
    """
    idx = sorted(set(subset))
    for j in idx:
        if not 0 <= j < table.n_factors:
            raise IndexError(f"factor index {j} out of range")
    if not idx:
        return Partition(np.zeros(table.n_units, dtype=np.int64))
    sub = table.cells[:, idx]
    _, inverse = np.unique(sub, axis=0, return_inverse=True)
    return Partition(inverse.reshape(-1))


def check_design(table: DesignTable) -> list[Diagnostic]:
    """Warnings about single-level factors, duplicated factors and unit indices."""
    out = []
    parts = [partition_of(table, [j]) for j in range(table.n_factors)]
    for f, p in zip(table.factors, parts):
        if p.n_classes == 1:
            out.append(Diagnostic("single-level",
                                  f"factor {f.name} has a single level and behaves as the Mean",
                                  f.name))
    for a in range(table.n_factors):
        for b in range(a + 1, table.n_factors):
            if parts[a] == parts[b]:
                fa, fb = table.factors[a].name, table.factors[b].name
                out.append(Diagnostic("equivalent-factors",
                                      f"factors {fa} and {fb} are equivalent and will be merged",
                                      fb))
    if table.n_units > 1:
        for f, p in zip(table.factors, parts):
            if p.is_discrete():
                out.append(Diagnostic("unit-index",
                                      f"factor {f.name} has one unit per level "
                                      "(it indexes the observational units)",
                                      f.name))
    return out
