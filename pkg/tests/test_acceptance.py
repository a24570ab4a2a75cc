"""Acceptance criteria, one check per criterion.

Under pytest the conftest hook prints a PASS/FAIL line per criterion in the
terminal summary. Run directly (``python3 tests/test_acceptance.py``) to get
the same lines without pytest's output.
"""

import sys
import time
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

import oracle  # noqa: E402
from designhasse import (  # noqa: E402
    DesignTable, build_layout, build_rls, classify, detect_confounding, model_equation,
    relation_table, suggest_rls_objects, suggestion_plan,
)
from designhasse.datasets import (  # noqa: E402
    all_fixtures, bibd_6_10_3, crossover_design, factorial_2p4, splitplot_design,
)
from designhasse.render import StyleConfig, emit_svg, layout_diagram  # noqa: E402
from designhasse.rls import MODEL_PREFIX  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


def c1_relation_table():
    t0 = time.perf_counter()
    structure = build_layout(splitplot_design().table)
    text = relation_table(structure)
    elapsed = time.perf_counter() - t0
    assert text == (GOLDEN / "splitplot_relations.txt").read_text(encoding="utf-8")
    header = text.splitlines()[1]
    assert "Plant=Be^So" in header and "Leaf=Be^Ly^So^Tr" in header
    assert elapsed < 1.0


def c2_df_table():
    structure = build_layout(splitplot_design().table)
    got = {o.name: (o.n_levels, o.df) for o in structure.objects}
    assert got == {
        "Mean": (1, 1), "Bench": (3, 2), "Lyr": (3, 2), "Soil": (4, 3), "Treat": (3, 2),
        "Bench^Lyr": (9, 4), "Bench^Soil": (12, 6), "Bench^Treat": (9, 4),
        "Lyr^Soil": (12, 6), "Lyr^Treat": (9, 4), "Soil^Treat": (12, 6),
        "Bench^Lyr^Treat": (19, 0), "Bench^Lyr^Soil^Treat": (36, -4),
    }


def c3_confounding():
    t0 = time.perf_counter()
    structure = build_layout(splitplot_design().table)
    report = detect_confounding(structure)
    elapsed = time.perf_counter() - t0
    assert report.total_confounded_df == 6
    assert report.headline() == "There are 6 confounded degrees of freedom"
    for row in report.rows:
        obj = structure.objects[row.object_id]
        if len(obj.factor_set) == 1 or obj.id == structure.finest_id:
            assert not row.confounded, row.name
        if row.confounded:
            assert len(obj.factor_set) >= 2
    # full column match
    assert report.format() == (GOLDEN / "splitplot_confound.txt").read_text(encoding="utf-8")
    assert elapsed < 5.0


def _suggested(fixture, arrows):
    structure = build_layout(fixture.table)
    return structure, {structure.objects[i].name for i in suggest_rls_objects(structure, arrows)}


def c4_rules_engine():
    _, got = _suggested(bibd_6_10_3(), [("Varieties", "Plots[Blocks]")])
    assert got == {"Mean", "Blocks", "Varieties", "Blocks^Varieties"}

    _, got = _suggested(crossover_design(),
                        [("Sequence", "Subject"), ("Treatment", "Period^Sequence")])
    assert got == {"Mean", "Period", "Sequence", "Treatment", "Subject",
                   "Period^Sequence^Treatment", "Period^Sequence^Subject^Treatment"}

    _, got = _suggested(splitplot_design(),
                        [("Soil", "Plant[Bench]"), ("Treat", "{Bench ⊗ Lyr}[Soil]")])
    assert got == {"Mean", "Bench", "Soil", "Treat", "Bench^Soil", "Lyr^Soil",
                   "Soil^Treat", "Bench^Lyr^Soil^Treat"}


def c5_model_equation():
    structure = build_layout(bibd_6_10_3().table)
    sug = suggest_rls_objects(structure, [("Varieties", "Plots[Blocks]")])
    rls = build_rls(structure, suggestion_plan(structure, sug, [(2, 3)]))
    eq = model_equation(rls)
    assert set(eq.fixed) == {"Blocks", "Varieties", "Blocks:Varieties"}
    assert eq.random == ()
    assert eq.format().startswith(MODEL_PREFIX + "\n")
    assert eq.text == "Response ~ Blocks + Varieties + Blocks:Varieties"


def c6_reclassification():
    structure = build_layout(crossover_design().table)
    obs = structure.find("Observation")
    assert obs.is_random
    assert obs.id == structure.finest_id
    assert any(d.code == "declared-random" and d.subject == "Observation"
               and "Observation" in d.message for d in structure.diagnostics)


def c7_factorial():
    structure = build_layout(factorial_2p4().table)
    assert len(structure.objects) == 16
    assert all(o.df == 1 for o in structure.objects if not o.is_mean)
    assert sum(o.df for o in structure.objects) == 16
    assert detect_confounding(structure).total_confounded_df == 0
    finest = structure.finest
    assert len(finest.factor_set) == 4
    assert [structure.table.names[j] for j in finest.merged] == ["Run"]


def _classes(svg: str) -> dict[str, int]:
    root = ET.fromstring(svg.encode("utf-8"))
    counts: dict[str, int] = {}
    for el in root.iter():
        c = el.get("class")
        if c:
            counts[c] = counts.get(c, 0) + 1
    return counts


def _geometry(svg: str, keep: set[str]) -> list[tuple]:
    root = ET.fromstring(svg.encode("utf-8"))
    return [(el.get("class"), el.get("x"), el.get("y"), el.get("x1"), el.get("y2"), el.get("d"))
            for el in root.iter() if el.get("class") in keep]


def c8_diagram_properties():
    structures = [build_layout(f.table) for f in all_fixtures()]
    b = build_layout(bibd_6_10_3().table)
    sug = suggest_rls_objects(b, [("Varieties", "Plots[Blocks]")])
    structures.append(build_rls(b, suggestion_plan(b, sug, [(2, 3)])))
    for s in structures:
        spec = layout_diagram(s)
        svg = emit_svg(spec)
        counts = _classes(svg)
        n_obj = len(spec.nodes)
        n_cover = len(s.cover_edges)
        assert counts["object"] == n_obj
        assert counts.get("structural", 0) == n_cover
        assert counts.get("partial", 0) == len(spec.dotted)
        assert emit_svg(layout_diagram(s)) == svg
        for flag, cls in (("show_df", "df"), ("show_partial", "partial"),
                          ("show_max_levels", "maxlevels")):
            off = emit_svg(spec, StyleConfig(**{flag: False}))
            c_off = _classes(off)
            assert cls not in c_off
            assert {k: v for k, v in counts.items() if k != cls} == c_off
            keep = {"object", "levels", "structural", "arrow"} | ({"df", "partial"} - {cls})
            assert _geometry(off, keep) == _geometry(svg, keep)
    assert _classes(emit_svg(layout_diagram(structures[-1])))["arrow"] == 1


@st.composite
def designs(draw):
    n_units = draw(st.integers(1, 40))
    n_factors = draw(st.integers(1, 6))
    cols = [draw(st.lists(st.integers(0, draw(st.integers(0, 5))),
                          min_size=n_units, max_size=n_units)) for _ in range(n_factors)]
    return cols


def _check_against_oracle(cols):
    table = DesignTable.from_columns({f"F{j}": c for j, c in enumerate(cols)})
    structure = build_layout(table)
    as_blocks = {}
    for o in structure.objects:
        groups = {}
        for u, k in enumerate(o.partition.class_of):
            groups.setdefault(int(k), set()).add(u)
        as_blocks[o.id] = frozenset(frozenset(g) for g in groups.values())
    expected = oracle.all_partitions(cols)
    assert set(as_blocks.values()) == expected
    assert len(as_blocks) == len(expected)
    for a in structure.objects:
        for b in structure.objects:
            assert classify(a.partition, b.partition).value == oracle.relationship(
                as_blocks[a.id], as_blocks[b.id])
    assert {(as_blocks[a], as_blocks[b]) for a, b in structure.cover_edges} == oracle.cover_pairs(expected)
    df = oracle.subtraction_df(expected)
    assert {as_blocks[o.id]: o.df for o in structure.objects} == df


def c9_oracle_equivalence():
    t0 = time.perf_counter()

    @settings(max_examples=200, deadline=None, derandomize=True,
              suppress_health_check=list(HealthCheck))
    @given(designs())
    def run(cols):
        _check_against_oracle(cols)

    run()
    assert time.perf_counter() - t0 < 60.0


CRITERIA = [
    ("c1-splitplot-relation-table", c1_relation_table),
    ("c2-splitplot-df-table", c2_df_table),
    ("c3-confounding-total-and-flags", c3_confounding),
    ("c4-rules-1-4-suggested-sets", c4_rules_engine),
    ("c5-bibd-model-equation", c5_model_equation),
    ("c6-crossover-randomness-reclassification", c6_reclassification),
    ("c7-factorial-properties", c7_factorial),
    ("c8-diagram-property-suite", c8_diagram_properties),
    ("c9-oracle-equivalence", c9_oracle_equivalence),
]


@pytest.mark.parametrize("check", [c for _, c in CRITERIA], ids=[k for k, _ in CRITERIA])
def test_criterion(check):
    check()


if __name__ == "__main__":
    failed = 0
    for key, check in CRITERIA:
        try:
            check()
            print(f"PASS  {key}")
        except Exception as exc:  # report and keep going
            failed += 1
            print(f"FAIL  {key}: {type(exc).__name__}: {exc}")
    sys.exit(1 if failed else 0)
