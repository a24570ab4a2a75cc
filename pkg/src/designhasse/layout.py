"""Layout structure: structural objects, refinement order, df and relation table.

Objects are built from the *primary* factors of a design. A base factor whose
partition equals a combination of other factors (e.g. a plant index that is
just bench-by-soil, or a unit index) is merged into that object rather than
kept as a separate main effect; its name survives in the merged display label
(``Plant=Be^So``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .design import DesignError, DesignTable, Diagnostic, Partition, partition_of
from .relations import Relationship, classify, refines

DEFAULT_MAX_FACTORS = 16

NESTED = "1"
CROSSED = "0"
PARTIAL = "(0)"
SELF = " "


@dataclass(frozen=True)
class StructuralObject:
    id: int
    factor_set: tuple[int, ...]
    partition: Partition = field(repr=False, compare=False)
    name: str
    display_label: str
    merged: tuple[int, ...]
    n_levels: int
    potential_max_levels: int | None
    is_random: bool
    df: int = 0
    tier: int = 0

    @property
    def is_mean(self) -> bool:
        return not self.factor_set

    @property
    def is_merged(self) -> bool:
        return bool(self.merged)

    def base_factors(self) -> tuple[int, ...]:
        """Every base factor naming this object: constituents plus merged ones."""
        return tuple(sorted(set(self.factor_set) | set(self.merged)))


@dataclass(frozen=True)
class LayoutStructure:
    table: DesignTable = field(repr=False)
    objects: tuple[StructuralObject, ...]
    coarser_than: frozenset[tuple[int, int]]
    cover_edges: tuple[tuple[int, int], ...]
    relation_matrix: tuple[tuple[str, ...], ...] = field(repr=False)
    finest_id: int
    diagnostics: tuple[Diagnostic, ...] = ()

    def __len__(self):
        return len(self.objects)

    @property
    def mean(self) -> StructuralObject:
        return self.objects[0]

    @property
    def finest(self) -> StructuralObject:
        return self.objects[self.finest_id]

    def strictly_coarser(self, oid: int) -> list[int]:
        return [c for c in range(len(self.objects)) if (c, oid) in self.coarser_than]

    def is_coarser(self, a: int, b: int) -> bool:
        """True iff object ``a`` is strictly coarser than object ``b``."""
        return (a, b) in self.coarser_than

    def comparable(self, a: int, b: int) -> bool:
        return a == b or (a, b) in self.coarser_than or (b, a) in self.coarser_than

    def find(self, label: str) -> StructuralObject:
        """Look an object up by row name, display label or merged factor name."""
        for o in self.objects:
            if label in (o.name, o.display_label):
                return o
            if any(self.table.names[j] == label for j in o.merged):
                return o
        raise KeyError(label)

    def object_for(self, partition: Partition) -> StructuralObject | None:
        for o in self.objects:
            if o.partition == partition:
                return o
        return None

    def relation(self, a: int, b: int) -> str:
        return self.relation_matrix[a][b]


def _abbrev(name: str) -> str:
    return name[:2]


def object_labels(table: DesignTable, factor_set: Sequence[int], merged: Sequence[int]) -> tuple[str, str]:
    """(row name, display label) for an object."""
    names = table.names
    if not factor_set:
        name = "Mean"
        short = "Mean"
    else:
        name = "^".join(names[j] for j in factor_set)
        if len(factor_set) == 1:
            short = name
        else:
            short = "^".join(_abbrev(names[j]) for j in factor_set)
    if merged:
        short = "=".join([names[j] for j in merged] + [short])
    return name, short


def factor_rank(table: DesignTable) -> list[int]:
    """Alphabetical position of each factor (case-insensitive, then exact)."""
    order = sorted(range(table.n_factors),
                   key=lambda j: (table.names[j].casefold(), table.names[j], j))
    rank = [0] * table.n_factors
    for r, j in enumerate(order):
        rank[j] = r
    return rank


def potential_max_levels(obj: StructuralObject, table: DesignTable) -> int | None:
    """Product of the constituent level counts, for generalised factors only."""
    if len(obj.factor_set) < 2:
        return None
    return math.prod(table.factors[j].n_levels for j in obj.factor_set)


def primary_factors(table: DesignTable) -> tuple[list[int], dict[int, Partition]]:
    """Split base factors into primaries and factors merged into combinations.

    A factor is merged when the factors it is nested in (among the remaining
    primaries) jointly reproduce its partition. Finer factors are tried first,
    so the unit index goes before the factors it is built from.
    """
    singles = [partition_of(table, [j]) for j in range(table.n_factors)]
    primaries = list(range(table.n_factors))
    merged: dict[int, Partition] = {}
    changed = True
    while changed:
        changed = False
        for f in sorted(primaries, key=lambda j: (-singles[j].n_classes, -j)):
            above = [g for g in primaries if g != f and refines(singles[f], singles[g])]
            if partition_of(table, above) == singles[f]:
                primaries.remove(f)
                merged[f] = singles[f]
                changed = True
                break
    return primaries, merged


def _order_pairs(parts: Sequence[Partition]) -> set[tuple[int, int]]:
    n = len(parts)
    out = set()
    for a in range(n):
        for b in range(n):
            if a != b and parts[a].n_classes < parts[b].n_classes and refines(parts[b], parts[a]):
                out.add((a, b))
    return out


def _tiers(parts: Sequence[Partition], coarser: set[tuple[int, int]]) -> list[int]:
    order = sorted(range(len(parts)), key=lambda i: parts[i].n_classes)
    tier = [0] * len(parts)
    above: dict[int, list[int]] = {i: [] for i in range(len(parts))}
    for a, b in coarser:
        above[b].append(a)
    for i in order:
        if above[i]:
            tier[i] = 1 + max(tier[a] for a in above[i])
    return tier


def enumerate_structural_objects(table: DesignTable,
                                 max_factors: int = DEFAULT_MAX_FACTORS) -> list[StructuralObject]:
    """One object per distinct partition generated by subsets of primary factors.

    Objects come back sorted coarse to fine (tier, then order of the
    generalised factor, then factor names alphabetically) with ids matching
    positions. Constituents are listed alphabetically too.
    A class containing a single primary factor is named after it; otherwise
    it is named by the largest factor set producing it, which is how a
    three-way combination nested in the fourth factor reads as the four-way.
    """
    if table.n_factors > max_factors:
        raise DesignError(
            f"design has {table.n_factors} factors; the limit is {max_factors} "
            "(all subsets are enumerated)"
        )
    rank = factor_rank(table)
    primaries, merged = primary_factors(table)
    primaries.sort(key=lambda j: rank[j])
    singles = [partition_of(table, [j]) for j in primaries]
    p = len(primaries)

    parts: list[Partition] = [partition_of(table, [])]
    groups: dict[bytes, list[int]] = {parts[0].key(): [0]}
    group_part: dict[bytes, Partition] = {parts[0].key(): parts[0]}
    for mask in range(1, 1 << p):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        part = singles[low] if rest == 0 else parts[rest].meet(singles[low])
        parts.append(part)
        key = part.key()
        groups.setdefault(key, []).append(mask)
        group_part.setdefault(key, part)

    drafts = []
    for key, masks in groups.items():
        solo = [m for m in masks if m & (m - 1) == 0 and m]
        if solo:
            canon_mask = solo[0]
        else:
            canon_mask = 0
            for m in masks:
                canon_mask |= m
        fset = tuple(primaries[i] for i in range(p) if canon_mask >> i & 1)
        part = group_part[key]
        absorbed = tuple(sorted((f for f, fp in merged.items() if fp == part),
                                key=lambda j: rank[j]))
        drafts.append((fset, part, absorbed))

    coarser = _order_pairs([d[1] for d in drafts])
    tiers = _tiers([d[1] for d in drafts], coarser)
    order = sorted(range(len(drafts)),
                   key=lambda i: (tiers[i], len(drafts[i][0]),
                                  [rank[j] for j in drafts[i][0]]))

    objects = []
    for new_id, i in enumerate(order):
        fset, part, absorbed = drafts[i]
        name, short = object_labels(table, fset, absorbed)
        obj = StructuralObject(
            id=new_id,
            factor_set=fset,
            partition=part,
            name=name,
            display_label=short,
            merged=absorbed,
            n_levels=part.n_classes,
            potential_max_levels=None,
            is_random=any(table.factors[j].is_random for j in fset),
            tier=tiers[i],
        )
        objects.append(replace(obj, potential_max_levels=potential_max_levels(obj, table)))
    return objects


def reclassify_randomness(objects: Sequence[StructuralObject],
                          table: DesignTable) -> tuple[list[StructuralObject], list[Diagnostic]]:
    """Make an object random when any base factor it refines is random.

    Such a factor appears in some equivalent representation of the object
    (O equals O^F whenever O is nested in F). A fixed factor naming a random
    object is reported, since the user declared it fixed.
    """
    base = [partition_of(table, [j]) for j in range(table.n_factors)]
    out, diags = [], []
    for o in objects:
        random = any(f.is_random and refines(o.partition, base[j])
                     for j, f in enumerate(table.factors))
        if random:
            naming = list(o.merged)
            if len(o.factor_set) == 1:
                naming.insert(0, o.factor_set[0])
            for j in naming:
                f = table.factors[j]
                if not f.is_random:
                    diags.append(Diagnostic(
                        "declared-random",
                        f"{f.name} was defined as a fixed factor but is equivalent to "
                        f"{o.name}, which involves a random factor; it is declared random. "
                        "Adjust the random flags if this is not intended.",
                        f.name,
                    ))
        out.append(replace(o, is_random=random))
    return out, diags


def refinement_order(objects: Sequence[StructuralObject]) -> tuple[frozenset[tuple[int, int]],
                                                                  tuple[tuple[int, int], ...]]:
    """Strict coarser-than pairs ``(coarse, fine)`` and their transitive reduction."""
    coarser = _order_pairs([o.partition for o in objects])
    edges = []
    for a, b in sorted(coarser):
        if not any((a, c) in coarser and (c, b) in coarser for c in range(len(objects))):
            edges.append((a, b))
    return frozenset(coarser), tuple(edges)


def df_by_subtraction(objects: Sequence[StructuralObject],
                      coarser_than: frozenset[tuple[int, int]]) -> list[StructuralObject]:
    """df(O) = levels(O) minus the df of every strictly coarser object."""
    pos = {o.id: i for i, o in enumerate(objects)}
    df: dict[int, int] = {}
    for o in sorted(objects, key=lambda o: o.n_levels):
        df[o.id] = o.n_levels - sum(df[a] for a, b in coarser_than
                                    if b == o.id and a in pos)
    return [replace(o, df=df[o.id]) for o in objects]


def relation_entry(a: StructuralObject, b: StructuralObject) -> str:
    if a.id == b.id:
        return SELF
    rel = classify(a.partition, b.partition)
    if rel is Relationship.NESTED_IN:
        return NESTED
    if rel is Relationship.FULLY_CROSSED:
        return CROSSED
    return PARTIAL


def relation_matrix(objects: Sequence[StructuralObject]) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(relation_entry(a, b) for b in objects) for a in objects)


def build_layout(table: DesignTable, max_factors: int = DEFAULT_MAX_FACTORS) -> LayoutStructure:
    """Run the whole pipeline: objects, randomness, order, df, relation matrix."""
    objects = enumerate_structural_objects(table, max_factors)
    objects, diags = reclassify_randomness(objects, table)
    coarser, edges = refinement_order(objects)
    objects = df_by_subtraction(objects, coarser)
    finest = max(range(len(objects)), key=lambda i: (objects[i].n_levels, i))
    return LayoutStructure(
        table=table,
        objects=tuple(objects),
        coarser_than=coarser,
        cover_edges=edges,
        relation_matrix=relation_matrix(objects),
        finest_id=finest,
        diagnostics=tuple(diags),
    )


def format_char_matrix(row_labels: Sequence[str], col_labels: Sequence[str],
                       cells: Sequence[Sequence[str]]) -> str:
    """Fixed-width quoted matrix, left aligned, each column padded to its widest cell."""
    quoted = [[f'"{c}"' for c in row] for row in cells]
    lw = max((len(r) for r in row_labels), default=0)
    widths = [max([len(h)] + [len(row[j]) for row in quoted]) for j, h in enumerate(col_labels)]
    lines = [" " * lw + "".join(" " + h.ljust(w) for h, w in zip(col_labels, widths))]
    for label, row in zip(row_labels, quoted):
        lines.append(label.ljust(lw) + "".join(" " + c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


TABLE_TITLE = ("The following table shows the relationships between the factors "
               "and generalised factors in the Layout Structure")


def relation_table(structure: LayoutStructure, title: bool = True) -> str:
    objs = structure.objects
    text = format_char_matrix([o.name for o in objs], [o.display_label for o in objs],
                              structure.relation_matrix)
    return (TABLE_TITLE + "\n" + text) if title else text


def to_dict(structure: LayoutStructure) -> dict:
    names = structure.table.names
    return {
        "n_units": structure.table.n_units,
        "factors": [{"name": f.name, "levels": f.n_levels, "random": f.is_random}
                    for f in structure.table.factors],
        "objects": [
            {
                "id": o.id,
                "name": o.name,
                "label": o.display_label,
                "factors": [names[j] for j in o.factor_set],
                "merged": [names[j] for j in o.merged],
                "levels": o.n_levels,
                "max_levels": o.potential_max_levels,
                "random": o.is_random,
                "df": o.df,
                "tier": o.tier,
            }
            for o in structure.objects
        ],
        "edges": [list(e) for e in structure.cover_edges],
        "finest": structure.finest_id,
        "relations": [list(r) for r in structure.relation_matrix],
    }


def to_json(structure: LayoutStructure) -> str:
    return json.dumps(to_dict(structure), indent=2, ensure_ascii=False) + "\n"
