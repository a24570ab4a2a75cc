"""Command-line front end: layout, objects, rls, datasets export."""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .confound import detect_confounding
from .datasets import FIXTURES, get_fixture
from .design import DesignError, DesignTable, load_design, read_flags_sidecar
from .layout import LayoutStructure, build_layout, relation_table
from .randexpr import ExpressionError
from .render import StyleConfig, emit_dot, emit_svg, layout_diagram
from .rls import (
    PlanError, RandomisationPlan, build_rls, model_equation, plan_template, read_arrows,
    read_plan, rls_relation_table, suggest_rls_objects, suggestion_plan, write_plan,
)


class CliError(Exception):
    pass


_STYLE_FIELDS = [f for f in fields(StyleConfig)
                 if f.name not in ("show_partial", "show_df", "show_max_levels", "monochrome")]


def _add_input(p: argparse.ArgumentParser):
    p.add_argument("input", nargs="?", help="design table CSV (one column per factor)")
    p.add_argument("--dataset", choices=sorted(FIXTURES), help="use a bundled example design instead of a file")
    p.add_argument("--flags", help="random-flags sidecar (name=0|1 per line); default <input>.flags if present")
    p.add_argument("--max-factors", type=int, default=16)


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--outdir", default=".", help="directory for output files")
    p.add_argument("--name", help="base name for output files")
    p.add_argument("--format", choices=("svg", "dot", "both"), default="svg")
    p.add_argument("--show-partial", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--show-df", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--show-max-levels", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--check-confound", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--table-out", action="store_true", help="print the relationship table")
    p.add_argument("--bw", action="store_true", help="black and white diagram")
    style = p.add_argument_group("diagram style")
    for f in _STYLE_FIELDS:
        kind = str if f.type in ("str", str) else float
        style.add_argument("--" + f.name.replace("_", "-"), type=kind, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="designhasse",
        description="Layout structures and Hasse diagrams for experimental designs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("layout", help="draw the layout structure of a design")
    _add_input(p)
    _add_output(p)

    p = sub.add_parser("objects", help="list structural objects and write a plan template")
    _add_input(p)
    p.add_argument("--outdir", default=".")
    p.add_argument("--name")

    p = sub.add_parser("rls", help="draw the restricted layout structure from a randomisation plan")
    _add_input(p)
    _add_output(p)
    p.add_argument("--plan", help="edited plan template CSV")
    p.add_argument("--arrows", help="randomisation arrows CSV (from,to)")
    p.add_argument("--suggest", action="store_true",
                   help="print the objects implied by the arrows as a proposed plan; writes nothing")
    p.add_argument("--equation-out", action="store_true", help="print the suggested mixed model")

    p = sub.add_parser("datasets", help="bundled example designs")
    dsub = p.add_subparsers(dest="action", required=True)
    e = dsub.add_parser("export", help="write a bundled design as CSV plus a flags sidecar")
    e.add_argument("dataset", choices=sorted(FIXTURES))
    e.add_argument("--outdir", default=".")
    dsub.add_parser("list", help="list bundled designs")
    return parser


# -- helpers -----------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load(args) -> tuple[DesignTable, str]:
    if args.dataset and args.input:
        raise CliError("give either an input file or --dataset, not both")
    if args.dataset:
        fx = get_fixture(args.dataset)
        table = fx.table
        if args.flags:
            table = table.with_random_flags(read_flags_sidecar(_read(args.flags), table.names))
        return table, args.dataset
    if not args.input:
        raise CliError("an input design CSV (or --dataset) is required")
    table = load_design(_read(args.input))
    flags_path = args.flags
    if flags_path is None:
        guess = Path(args.input).with_suffix(".flags")
        flags_path = str(guess) if guess.exists() else None
    if flags_path:
        table = table.with_random_flags(read_flags_sidecar(_read(flags_path), table.names))
    return table, Path(args.input).stem


def _style(args) -> StyleConfig:
    overrides = {f.name: getattr(args, f.name) for f in _STYLE_FIELDS if getattr(args, f.name) is not None}
    return StyleConfig(show_partial=args.show_partial, show_df=args.show_df,
                       show_max_levels=args.show_max_levels, monochrome=args.bw, **overrides)


def _base_name(args, default: str) -> str:
    name = default if args.name is None else args.name
    if not name.strip():
        raise CliError("output base name must not be empty")
    return name


def _diagram_files(structure, style: StyleConfig, fmt: str, outdir: Path, name: str) -> dict[Path, str]:
    spec = layout_diagram(structure, style)
    files = {}
    if fmt in ("svg", "both"):
        files[outdir / f"{name}.svg"] = emit_svg(spec)
    if fmt in ("dot", "both"):
        files[outdir / f"{name}.dot"] = emit_dot(spec)
    return files


def _write_all(files: dict[Path, str]):
    """Write every file or none: anything already written is removed on failure."""
    done = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            done.append(path)
    except OSError as exc:
        for path in done:
            path.unlink(missing_ok=True)
        raise CliError(f"cannot write {exc.filename}: {exc.strerror}") from None


def _warn(diagnostics):
    for d in diagnostics:
        print(str(d), file=sys.stderr)


# -- commands ----------------------------------------------------------------

def cmd_layout(args) -> int:
    table, stem = _load(args)
    style = _style(args)
    name = _base_name(args, f"{stem}_layout")
    structure = build_layout(table, max_factors=args.max_factors)
    files = _diagram_files(structure, style, args.format, Path(args.outdir), name)
    report = detect_confounding(structure) if args.check_confound else None
    _write_all(files)
    _warn(structure.diagnostics)
    if report is not None:
        _warn(report.diagnostics)
        if report.total_confounded_df > 0:
            print(report.format())
    if args.table_out:
        print(relation_table(structure))
    for path in files:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_objects(args) -> int:
    table, stem = _load(args)
    name = _base_name(args, f"{stem}_plan")
    structure = build_layout(table, max_factors=args.max_factors)
    path = Path(args.outdir) / f"{name}.csv"
    _write_all({path: plan_template(structure)})
    _warn(structure.diagnostics)
    print("Structural objects")
    width = len(str(len(structure.objects)))
    for o in structure.objects:
        print(f"{str(o.id + 1).rjust(width)}  {o.name}")
    print(f"\nFill in the randomisation_object column of {path} (leave NULL to omit an object).")
    return 0


def _suggest(args, structure: LayoutStructure) -> int:
    if not args.arrows:
        raise CliError("--suggest needs an --arrows file naming the randomisation arrows")
    import csv
    import io
    rows = [r for r in csv.reader(io.StringIO(_read(args.arrows))) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["from", "to"]:
        raise CliError("arrows file must start with the header from,to")
    pairs = []
    for r in rows[1:]:
        ends = []
        for cell in r:
            cell = cell.strip()
            if cell.isdigit():
                k = int(cell)
                if not 1 <= k <= len(structure.objects):
                    raise CliError(f"arrow endpoint {k} does not exist")
                cell = structure.objects[k - 1].name
            ends.append(cell)
        if len(ends) != 2:
            raise CliError("each arrow needs exactly two fields")
        pairs.append((ends[0], ends[1]))
    suggestions = suggest_rls_objects(structure, pairs)
    plan = suggestion_plan(structure, suggestions)
    print("Objects implied by the randomisation arrows:")
    for s in suggestions.values():
        print(f"  {structure.objects[s.object_id].name}: {s.label} (rule {s.rule})")
    print("\nProposed plan:")
    print(write_plan(structure, plan), end="")
    return 0


def cmd_rls(args) -> int:
    table, stem = _load(args)
    structure = build_layout(table, max_factors=args.max_factors)
    if args.suggest:
        return _suggest(args, structure)
    if not args.plan:
        raise CliError("rls needs --plan (or --suggest with --arrows)")
    style = _style(args)
    name = _base_name(args, f"{stem}_rls")
    labels = read_plan(_read(args.plan), structure)
    arrows = read_arrows(_read(args.arrows), structure, labels) if args.arrows else ()
    rls = build_rls(structure, RandomisationPlan(labels, arrows))
    files = _diagram_files(rls, style, args.format, Path(args.outdir), name)
    report = detect_confounding(structure, include=rls.ids, df=rls.df) if args.check_confound else None
    _write_all(files)
    _warn(structure.diagnostics)
    _warn(rls.diagnostics)
    if report is not None and report.total_confounded_df > 0:
        print(report.format())
    if args.table_out:
        print(rls_relation_table(rls))
    if args.equation_out:
        print(model_equation(rls).format())
    for path in files:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_datasets(args) -> int:
    if args.action == "list":
        for key in sorted(FIXTURES):
            fx = get_fixture(key)
            print(f"{key}: {fx.provenance}")
        return 0
    fx = get_fixture(args.dataset)
    outdir = Path(args.outdir)
    files = {outdir / f"{fx.name}.csv": fx.to_csv(), outdir / f"{fx.name}.flags": fx.flags_text()}
    _write_all(files)
    for path in files:
        print(f"wrote {path}", file=sys.stderr)
    return 0


COMMANDS = {"layout": cmd_layout, "objects": cmd_objects, "rls": cmd_rls, "datasets": cmd_datasets}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CliError, DesignError, PlanError, ExpressionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
