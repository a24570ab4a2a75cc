"""Confounded degrees of freedom from indicator-matrix subspaces.

Each object's indicator columns are orthogonalised against the span of every
strictly coarser object. The dimension left over is its rank-based df. The
subtraction method assumes these residual spaces are independent; where they
are not, some df are claimed by more than one object.

The total reported is the df claimed by subtraction across all objects except
the observational unit, minus the dimension those objects actually span. An
object is flagged when its rank-based df disagrees with subtraction, or when
its residual space intersects the joint residual span of the objects it is
neither nested in nor nesting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .design import Diagnostic
from .layout import LayoutStructure

RTOL = 1e-8


@dataclass(frozen=True)
class ResidualSpace:
    object_id: int
    basis: np.ndarray = field(repr=False)
    df_rank: int
    ambiguous: bool = False


@dataclass(frozen=True)
class ConfoundRow:
    object_id: int
    name: str
    n_levels: int
    df_subtraction: int
    df_rank: int
    confounded: bool


@dataclass(frozen=True)
class ConfoundReport:
    rows: tuple[ConfoundRow, ...]
    total_confounded_df: int
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def flagged(self) -> list[str]:
        return [r.name for r in self.rows if r.confounded]

    def row(self, name: str) -> ConfoundRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def headline(self) -> str:
        n = self.total_confounded_df
        if n == 1:
            return "There is 1 confounded degree of freedom"
        return f"There are {n} confounded degrees of freedom"

    def format(self) -> str:
        return self.headline() + "\n" + format_df_table(self.rows)


def format_df_table(rows: Iterable[ConfoundRow]) -> str:
    rows = list(rows)
    headers = ["Actual levels", "DF by Subtraction", "Potential Confounded DF"]
    cells = [[str(r.n_levels), str(r.df_subtraction), "Yes" if r.confounded else "No"]
             for r in rows]
    lw = max((len(r.name) for r in rows), default=0)
    widths = [max([len(h)] + [len(c[j]) for c in cells]) for j, h in enumerate(headers)]
    lines = [" " * lw + "".join(" " + h.rjust(w) for h, w in zip(headers, widths))]
    for r, c in zip(rows, cells):
        lines.append(r.name.ljust(lw) + "".join(" " + v.rjust(w) for v, w in zip(c, widths)))
    return "\n".join(lines) + "\n"


def _basis(m: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray, bool]:
    if m.shape[1] == 0:
        return m, np.zeros(0), False
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    thr = RTOL * scale
    keep = s > thr
    ambiguous = bool(np.any((s > thr / 10) & (s < thr * 10)))
    return u[:, keep], s, ambiguous


def _scale(*mats: np.ndarray) -> float:
    return max([np.linalg.norm(m, 2) for m in mats if m.size] + [1.0])


def rank(m: np.ndarray) -> int:
    return _basis(m, _scale(m))[0].shape[1]


def _stack(mats, n_units) -> np.ndarray:
    mats = [m for m in mats]
    return np.hstack(mats) if mats else np.zeros((n_units, 0))


def residual_df_rank(object_id: int, structure: LayoutStructure,
                     include: Iterable[int] | None = None) -> ResidualSpace:
    """Orthonormal basis of the object's indicator span after removing coarser objects.

    ``include`` restricts the coarser objects considered (used for
    restricted layout structures).
    """
    pool = set(range(len(structure.objects)) if include is None else include)
    n = structure.table.n_units
    obj = structure.objects[object_id]
    x = obj.partition.indicator()
    above = _stack([structure.objects[c].partition.indicator()
                    for c in structure.strictly_coarser(object_id) if c in pool], n)
    scale = _scale(x, above)
    q, _, amb1 = _basis(above, scale)
    r = x - q @ (q.T @ x) if q.shape[1] else x
    b, _, amb2 = _basis(r, scale)
    return ResidualSpace(object_id, b, b.shape[1], amb1 or amb2)


def residual_spaces(structure: LayoutStructure,
                    include: Iterable[int] | None = None) -> dict[int, ResidualSpace]:
    ids = sorted(range(len(structure.objects)) if include is None else set(include))
    return {i: residual_df_rank(i, structure, ids) for i in ids}


def detect_confounding(structure: LayoutStructure, include: Iterable[int] | None = None,
                       df: Mapping[int, int] | None = None) -> ConfoundReport:
    """Confounding report over all objects, or over the ``include`` subset.

    ``df`` overrides the subtraction df (a restricted structure recomputes
    them over its own objects).
    """
    ids = sorted(range(len(structure.objects)) if include is None else set(include))
    if df is None:
        df = {i: structure.objects[i].df for i in ids}
    n = structure.table.n_units
    mean_id = 0
    finest = structure.finest_id
    spaces = residual_spaces(structure, ids)

    body = [i for i in ids if i not in (mean_id, finest)]
    claimed = sum(df[i] for i in ids if i != finest)
    spanned = rank(_stack([structure.objects[i].partition.indicator()
                           for i in ids if i != finest], n))
    total = claimed - spanned

    flags = {}
    for i in body:
        if spaces[i].df_rank != df[i]:
            flags[i] = True
            continue
        others = [spaces[j].basis for j in body
                  if j != i and not structure.comparable(i, j)]
        if not others or spaces[i].df_rank == 0:
            flags[i] = False
            continue
        o = _stack(others, n)
        r_o = rank(o)
        overlap = spaces[i].df_rank + r_o - rank(np.hstack([spaces[i].basis, o]))
        flags[i] = overlap > 0

    diags = []
    for i in ids:
        if spaces[i].ambiguous:
            diags.append(Diagnostic(
                "rank-tolerance",
                f"a singular value for {structure.objects[i].name} lies close to the "
                "rank tolerance; its rank-based df may be unreliable",
                structure.objects[i].name,
            ))

    rows = tuple(
        ConfoundRow(
            object_id=i,
            name=structure.objects[i].name,
            n_levels=structure.objects[i].n_levels,
            df_subtraction=df[i],
            df_rank=spaces[i].df_rank,
            confounded=flags.get(i, False),
        )
        for i in ids if i != mean_id
    )
    return ConfoundReport(rows, total, tuple(diags))
