"""Restricted layout structure: randomisation plans, Rules 1-4, model equation."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .design import Diagnostic, partition_of
from .layout import LayoutStructure, StructuralObject, format_char_matrix
from .randexpr import (
    MEAN, Alias, Base, ExpressionError, Expr, Randomised, Within, format_expr,
    names_in, parse_rand_expr, rand_nest_set,
)

NULL = "NULL"
MODEL_PREFIX = "The suggested mixed model to be fitted is:"


class PlanError(ValueError):
    """Invalid randomisation plan or arrows. Carries every problem found."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class RandomisationPlan:
    labels: tuple[str | None, ...]
    arrows: tuple[tuple[int, int], ...] = ()

    def included(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab is not None]


# -- expressions against a structure ---------------------------------------

def resolve(expr: Expr | str, structure: LayoutStructure) -> StructuralObject:
    """Structural object whose partition matches the factor names in ``expr``.

    Every ``X[C]`` inside the expression must have ``C`` strictly coarser
    than ``X[C]`` itself.
    """
    table = structure.table
    if isinstance(expr, str):
        expr = parse_rand_expr(expr, table.names)
    if isinstance(expr, Randomised):
        raise ExpressionError(f"{format_expr(expr)!r} describes a randomisation, not an object")
    if isinstance(expr, Alias):
        return resolve(expr.inner, structure)
    names = [n for n in names_in(expr) if n != "Mean"]
    unknown = [n for n in names if n not in table.names]
    if unknown:
        raise ExpressionError(f"unknown factor name {unknown[0]!r} in {format_expr(expr)!r}")
    obj = structure.object_for(partition_of(table, [table.index(n) for n in names]))
    if obj is None:  # pragma: no cover - every subset maps onto some object
        raise ExpressionError(f"{format_expr(expr)!r} does not match a structural object")
    _check_contexts(expr, structure)
    return obj


def _check_contexts(expr: Expr, structure: LayoutStructure):
    if isinstance(expr, Within):
        whole = resolve_names(expr, structure)
        ctx = resolve_names(expr.context, structure)
        if not structure.is_coarser(ctx.id, whole.id):
            raise ExpressionError(
                f"in {format_expr(expr)!r} the context {format_expr(expr.context)!r} "
                "is not coarser than the object it nests"
            )
        _check_contexts(expr.inner, structure)
        _check_contexts(expr.context, structure)
    elif hasattr(expr, "children"):
        for c in expr.children:
            _check_contexts(c, structure)


def resolve_names(expr: Expr, structure: LayoutStructure) -> StructuralObject:
    table = structure.table
    names = [n for n in names_in(expr) if n != "Mean"]
    return structure.object_for(partition_of(table, [table.index(n) for n in names]))


# -- Rules 1-4 ---------------------------------------------------------------

@dataclass(frozen=True)
class Suggestion:
    object_id: int
    label: str
    rule: int


def _label_for(obj: StructuralObject, expr: Expr, structure: LayoutStructure) -> str:
    if expr == MEAN or obj.is_mean:
        return "Mean"
    text = format_expr(expr)
    if isinstance(expr, Alias):
        return text
    merged = [structure.table.names[j] for j in obj.merged]
    if merged and not set(merged) & set(names_in(expr)):
        return f"{merged[0]}={text}"
    return text


def default_label(obj: StructuralObject, structure: LayoutStructure) -> str:
    """Merged factor name when the object carries one, else its structural name."""
    if obj.merged and not obj.is_mean:
        return structure.table.names[obj.merged[0]]
    return obj.name


def suggest_rls_objects(structure: LayoutStructure,
                        arrows: Iterable[tuple[Expr | str, Expr | str]]) -> dict[int, Suggestion]:
    """Randomisation objects implied by the arrows, keyed by structural object id.

    Rule 1 keeps both ends of each arrow, Rule 2 adds whatever
    randomisation-nests them, Rule 3 adds the Mean and the observational
    unit, Rule 4 adds fixed generalised factors built only from fixed
    factors that are themselves randomised (arrow sources).
    """
    table = structure.table
    found: dict[int, Suggestion] = {}
    queue: list[Expr] = []

    def add(obj: StructuralObject, label: str, rule: int):
        if obj.id not in found:
            found[obj.id] = Suggestion(obj.id, label, rule)

    sources: set[int] = set()
    for src, dst in arrows:
        src_e = parse_rand_expr(src, table.names) if isinstance(src, str) else src
        dst_e = parse_rand_expr(dst, table.names) if isinstance(dst, str) else dst
        a, b = resolve(src_e, structure), resolve(dst_e, structure)
        if a.id != b.id and not structure.is_coarser(a.id, b.id):
            raise PlanError([
                f"arrow {format_expr(src_e)} → {format_expr(dst_e)} points upwards: "
                f"{b.name} is not nested in {a.name}"
            ])
        add(a, _label_for(a, src_e, structure), 1)
        add(b, _label_for(b, dst_e, structure), 1)
        queue += [src_e, dst_e]
        sources |= {table.index(n) for n in names_in(src_e) if n != "Mean"}

    seen: list[Expr] = []
    while queue:
        expr = queue.pop(0)
        if expr in seen:
            continue
        seen.append(expr)
        for nest in rand_nest_set(expr):
            obj = resolve(nest, structure)
            add(obj, _label_for(obj, nest, structure), 2)
            queue.append(nest)

    add(structure.mean, "Mean", 3)
    add(structure.finest, default_label(structure.finest, structure), 3)

    fixed_sources = sorted(j for j in sources if not table.factors[j].is_random)
    for size in range(2, len(fixed_sources) + 1):
        for combo in itertools.combinations(fixed_sources, size):
            obj = structure.object_for(partition_of(table, combo))
            if obj is not None and len(obj.factor_set) >= 2 and not obj.is_random:
                add(obj, default_label(obj, structure), 4)
    return dict(sorted(found.items()))


def suggestion_plan(structure: LayoutStructure, suggestions: dict[int, Suggestion],
                    arrows: Sequence[tuple[int, int]] = ()) -> RandomisationPlan:
    labels = tuple(suggestions[i].label if i in suggestions else None
                   for i in range(len(structure.objects)))
    return RandomisationPlan(labels, tuple(arrows))


# -- plans -------------------------------------------------------------------

def validate_plan(structure: LayoutStructure, plan: RandomisationPlan) -> list[Diagnostic]:
    """Check a plan; raise :class:`PlanError` listing every error, else return warnings."""
    n = len(structure.objects)
    errors: list[str] = []
    warnings: list[Diagnostic] = []
    if len(plan.labels) != n:
        raise PlanError([f"plan has {len(plan.labels)} rows, the layout has {n} objects"])
    for i, lab in enumerate(plan.labels):
        if lab is None:
            continue
        try:
            parse_rand_expr(lab)
        except ExpressionError as exc:
            errors.append(f"row {i + 1} ({structure.objects[i].name}): {exc}")
    if not any(lab is not None for i, lab in enumerate(plan.labels) if i != 0):
        errors.append("no non-Mean randomisation objects defined")
    for a, b in plan.arrows:
        if not (0 <= a < n and 0 <= b < n):
            errors.append(f"arrow {a + 1}->{b + 1} refers to an object that does not exist")
            continue
        for end in (a, b):
            if plan.labels[end] is None:
                errors.append(
                    f"arrow {a + 1}->{b + 1}: object {end + 1} ({structure.objects[end].name}) "
                    "is NULL; it must first be given a randomisation label"
                )
        if a != b and not structure.is_coarser(a, b):
            errors.append(
                f"arrow {a + 1}->{b + 1}: randomisation arrows must point downwards, "
                f"but {structure.objects[b].name} is not nested in {structure.objects[a].name}"
            )
    if errors:
        raise PlanError(errors)
    for oid, what in ((0, "the Mean"), (structure.finest_id, "the observational unit")):
        if plan.labels[oid] is None:
            warnings.append(Diagnostic(
                "rule-3",
                f"{what} ({structure.objects[oid].name}) is NULL in the plan but is "
                "always part of the restricted layout structure; it is kept",
                structure.objects[oid].name,
            ))
    return warnings


def plan_template(structure: LayoutStructure) -> str:
    """Two-column CSV: structural object, randomisation object (Mean / NULL)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["structural_object", "randomisation_object"])
    for o in structure.objects:
        w.writerow([o.name, "Mean" if o.is_mean else NULL])
    return buf.getvalue()


def write_plan(structure: LayoutStructure, plan: RandomisationPlan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["structural_object", "randomisation_object"])
    for o, lab in zip(structure.objects, plan.labels):
        w.writerow([o.name, NULL if lab is None else lab])
    return buf.getvalue()


def read_plan(text: str, structure: LayoutStructure) -> tuple[str | None, ...]:
    """Randomisation labels from an edited template, in layout order."""
    rows = [r for r in csv.reader(io.StringIO(text.lstrip("﻿"))) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["structural_object", "randomisation_object"]:
        raise PlanError(["plan must start with the header structural_object,randomisation_object"])
    body = rows[1:]
    n = len(structure.objects)
    if len(body) != n:
        raise PlanError([f"plan has {len(body)} rows, the layout has {n} objects"])
    labels = []
    problems = []
    for i, (row, obj) in enumerate(zip(body, structure.objects), start=1):
        if len(row) != 2:
            problems.append(f"plan row {i} must have two fields")
            labels.append(None)
            continue
        name, lab = row[0].strip(), row[1].strip()
        if name != obj.name:
            problems.append(f"plan row {i} names {name!r}, expected {obj.name!r}")
        labels.append(None if lab in ("", NULL) else lab)
    if problems:
        raise PlanError(problems)
    return tuple(labels)


def read_arrows(text: str, structure: LayoutStructure,
                labels: Sequence[str | None] = ()) -> tuple[tuple[int, int], ...]:
    """Arrows from a ``from,to`` CSV of 1-based object numbers or labels.

    Labels may be structural names, display labels, merged factor names or
    randomisation labels from ``labels``. Numbered arrows follow the rule that
    the second number must be larger than the first (arrows point down the
    diagram); equal numbers mean a randomisation within one object.
    """
    rows = [r for r in csv.reader(io.StringIO(text.lstrip("﻿"))) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["from", "to"]:
        raise PlanError(["arrows file must start with the header from,to"])
    n = len(structure.objects)
    out = []
    problems = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            problems.append(f"arrows line {lineno} must have two fields")
            continue
        ends = []
        numeric = all(c.strip().isdigit() for c in row)
        for cell in row:
            cell = cell.strip()
            if numeric:
                k = int(cell)
                if not 1 <= k <= n:
                    problems.append(f"arrows line {lineno}: object {k} does not exist (1..{n})")
                    break
                ends.append(k - 1)
            else:
                oid = _lookup(cell, structure, labels)
                if oid is None:
                    problems.append(f"arrows line {lineno}: unknown object {cell!r}")
                    break
                ends.append(oid)
        if len(ends) != 2:
            continue
        if numeric and ends[0] > ends[1]:
            problems.append(
                f"arrows line {lineno}: {ends[0] + 1}->{ends[1] + 1} violates the downward-arrow "
                "rule; the second entry must be larger than the first"
            )
            continue
        out.append((ends[0], ends[1]))
    if problems:
        raise PlanError(problems)
    return tuple(out)


def _lookup(cell: str, structure: LayoutStructure, labels: Sequence[str | None]) -> int | None:
    for i, lab in enumerate(labels):
        if lab is not None and lab == cell:
            return i
    try:
        return structure.find(cell).id
    except KeyError:
        pass
    try:
        return resolve(cell, structure).id
    except (ExpressionError, KeyError):
        return None


def arrows_csv(arrows: Sequence[tuple[int, int]]) -> str:
    return "from,to\n" + "".join(f"{a + 1},{b + 1}\n" for a, b in arrows)


# -- the restricted structure ------------------------------------------------

@dataclass(frozen=True)
class ModelEquation:
    fixed: tuple[str, ...]
    random: tuple[str, ...]

    @property
    def text(self) -> str:
        terms = list(self.fixed) + [f"(1 | {t})" for t in self.random]
        if not self.fixed:
            terms.insert(0, "1")
        return "Response ~ " + " + ".join(terms)

    def format(self) -> str:
        return f"{MODEL_PREFIX}\n {self.text}\n"


@dataclass(frozen=True)
class RestrictedLayoutStructure:
    layout: LayoutStructure = field(repr=False)
    ids: tuple[int, ...]
    labels: dict[int, str]
    arrows: tuple[tuple[int, int], ...]
    cover_edges: tuple[tuple[int, int], ...]
    df: dict[int, int]
    tiers: dict[int, int]
    diagnostics: tuple[Diagnostic, ...] = ()

    def objects(self) -> list[StructuralObject]:
        return [self.layout.objects[i] for i in self.ids]

    def relation_matrix(self) -> tuple[tuple[str, ...], ...]:
        m = self.layout.relation_matrix
        return tuple(tuple(m[a][b] for b in self.ids) for a in self.ids)

    def label(self, oid: int) -> str:
        return self.labels[oid]


def build_rls(structure: LayoutStructure, plan: RandomisationPlan) -> RestrictedLayoutStructure:
    warnings = validate_plan(structure, plan)
    labels = {i: lab for i, lab in enumerate(plan.labels) if lab is not None}
    labels.setdefault(0, "Mean")
    labels.setdefault(structure.finest_id, default_label(structure.finest, structure))
    ids = tuple(sorted(labels))
    pool = set(ids)
    coarser = {(a, b) for a, b in structure.coarser_than if a in pool and b in pool}
    edges = tuple(sorted(
        (a, b) for a, b in coarser
        if not any((a, c) in coarser and (c, b) in coarser for c in ids)
    ))
    df: dict[int, int] = {}
    tiers: dict[int, int] = {}
    for i in sorted(ids, key=lambda i: structure.objects[i].n_levels):
        above = [a for a, b in coarser if b == i]
        df[i] = structure.objects[i].n_levels - sum(df[a] for a in above)
        tiers[i] = 1 + max((tiers[a] for a in above), default=-1)
    return RestrictedLayoutStructure(
        layout=structure,
        ids=ids,
        labels=labels,
        arrows=tuple(plan.arrows),
        cover_edges=edges,
        df=df,
        tiers=tiers,
        diagnostics=tuple(warnings),
    )


def model_term(obj: StructuralObject, structure: LayoutStructure) -> str:
    """Shortest colon-joined subset of the object's factors that gives its partition.

    Ties go to the alphabetically first subset, so ``Period^Sequence^Treatment``
    in a Williams crossover becomes ``Period:Sequence``.
    """
    table = structure.table
    ranked = sorted(obj.factor_set, key=lambda j: table.names[j].casefold())
    for size in range(1, len(ranked) + 1):
        for combo in itertools.combinations(ranked, size):
            if partition_of(table, combo) == obj.partition:
                return ":".join(table.names[j] for j in combo)
    return ":".join(table.names[j] for j in ranked)  # pragma: no cover


def model_equation(rls: RestrictedLayoutStructure) -> ModelEquation:
    """One term per included non-Mean object; random objects go to the random part."""
    fixed, random = [], []
    for o in rls.objects():
        if o.is_mean:
            continue
        (random if o.is_random else fixed).append(model_term(o, rls.layout))
    return ModelEquation(tuple(fixed), tuple(random))


RLS_TABLE_TITLE = ("The following table shows the relationships between the "
                   "randomisation objects in the Restricted Layout Structure")


def rls_relation_table(rls: RestrictedLayoutStructure, title: bool = True) -> str:
    labels = [rls.labels[i] for i in rls.ids]
    text = format_char_matrix(labels, labels, rls.relation_matrix())
    return (RLS_TABLE_TITLE + "\n" + text) if title else text
