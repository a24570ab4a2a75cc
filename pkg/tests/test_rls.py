import pytest

from designhasse import build_rls, model_equation, suggest_rls_objects, suggestion_plan
from designhasse.randexpr import ExpressionError
from designhasse.rls import (
    PlanError, RandomisationPlan, plan_template, read_arrows, read_plan, resolve,
    rls_relation_table, validate_plan, write_plan,
)


def _plan(structure, mapping, arrows=()):
    labels = tuple(mapping.get(o.name) for o in structure.objects)
    return RandomisationPlan(labels, tuple(arrows))


def test_resolve(splitplot):
    assert resolve("Plant[Bench]", splitplot).name == "Bench^Soil"
    assert resolve("{Bench ⊗ Lyr}[Soil]", splitplot).id == splitplot.finest_id
    assert resolve("Mean", splitplot).is_mean
    with pytest.raises(ExpressionError, match="not coarser"):
        resolve("Bench[Plant]", splitplot)
    with pytest.raises(ExpressionError, match="unknown"):
        resolve("Plot[Block]", splitplot)


def test_suggest_labels_and_rules(splitplot):
    sug = suggest_rls_objects(splitplot, [("Soil", "Plant[Bench]"),
                                          ("Treat", "{Bench ⊗ Lyr}[Soil]")])
    by_name = {splitplot.objects[i].name: s for i, s in sug.items()}
    assert by_name["Bench^Lyr^Soil^Treat"].label == "Leaf={Bench ⊗ Lyr}[Soil]"
    assert by_name["Lyr^Soil"].label == "Lyr[Soil]"
    assert by_name["Soil^Treat"].rule == 4
    assert by_name["Soil"].rule == 1


def test_suggest_upward_arrow_rejected(splitplot):
    with pytest.raises(PlanError, match="upwards"):
        suggest_rls_objects(splitplot, [("Plant[Bench]", "Soil")])


def test_crossover_observation_label(crossover):
    sug = suggest_rls_objects(crossover, [("Sequence", "Subject"), ("Treatment", "Period^Sequence")])
    assert sug[crossover.finest_id].label == "Observation"


def test_rls_df_recomputed(splitplot):
    sug = suggest_rls_objects(splitplot, [("Soil", "Plant[Bench]"),
                                          ("Treat", "{Bench ⊗ Lyr}[Soil]")])
    rls = build_rls(splitplot, suggestion_plan(splitplot, sug))
    df = {splitplot.objects[i].name: d for i, d in rls.df.items()}
    assert df["Lyr^Soil"] == 8
    assert df["Bench^Lyr^Soil^Treat"] == 8
    assert sum(df.values()) == 36
    eq = model_equation(rls)
    assert eq.fixed == ("Soil", "Treat", "Soil:Treat")
    assert "Bench:Soil" in eq.random


def test_null_finest_kept_with_warning(bibd):
    plan = _plan(bibd, {"Mean": "Mean", "Blocks": "Blocks"})
    rls = build_rls(bibd, plan)
    # finest is always kept, with a warning
    assert any(d.code == "rule-3" for d in rls.diagnostics)
    assert bibd.finest_id in rls.ids


def test_validate_errors(bibd):
    with pytest.raises(PlanError, match="no non-Mean"):
        validate_plan(bibd, _plan(bibd, {"Mean": "Mean"}))
    with pytest.raises(PlanError, match="NULL"):
        validate_plan(bibd, _plan(bibd, {"Mean": "Mean", "Blocks": "Blocks"}, [(1, 2)]))
    with pytest.raises(PlanError, match="downwards"):
        validate_plan(bibd, _plan(bibd, {"Mean": "Mean", "Blocks": "B", "Varieties": "V"}, [(1, 2)]))
    with pytest.raises(PlanError, match="expected"):
        validate_plan(bibd, _plan(bibd, {"Mean": "Mean", "Blocks": "B["}))


def test_self_randomisation_allowed(factorial):
    plan = _plan(factorial, {"Mean": "Mean", "Catalyst^Concentration^Pressure^Temperature":
                             "Catal∧Conc∧Press∧Temp → Run"}, [(15, 15)])
    rls = build_rls(factorial, plan)
    assert rls.arrows == ((15, 15),)


def test_template_round_trip(bibd):
    text = plan_template(bibd)
    assert text.splitlines() == [
        "structural_object,randomisation_object", "Mean,Mean", "Blocks,NULL",
        "Varieties,NULL", "Blocks^Varieties,NULL",
    ]
    labels = read_plan(text, bibd)
    with pytest.raises(PlanError, match="no non-Mean"):
        validate_plan(bibd, RandomisationPlan(labels))
    plan = _plan(bibd, {"Mean": "Mean", "Blocks": "Blocks", "Varieties": "Varieties",
                        "Blocks^Varieties": "Plot[Block]"})
    assert read_plan(write_plan(bibd, plan), bibd) == plan.labels


def test_read_plan_errors(bibd):
    with pytest.raises(PlanError, match="header"):
        read_plan("a,b\n", bibd)
    with pytest.raises(PlanError, match="rows"):
        read_plan("structural_object,randomisation_object\nMean,Mean\n", bibd)


def test_read_arrows(bibd):
    labels = ("Mean", "Blocks", "Varieties", "Plot[Block]")
    assert read_arrows("from,to\n3,4\n", bibd) == ((2, 3),)
    assert read_arrows("from,to\nVarieties,Plot[Block]\n", bibd, labels) == ((2, 3),)
    assert read_arrows("from,to\n4,4\n", bibd) == ((3, 3),)
    with pytest.raises(PlanError, match="larger than the first"):
        read_arrows("from,to\n4,3\n", bibd)
    with pytest.raises(PlanError, match="does not exist"):
        read_arrows("from,to\n1,9\n", bibd)


def test_rls_relation_table(bibd):
    plan = _plan(bibd, {"Mean": "Mean", "Blocks": "Blocks", "Varieties": "Varieties",
                        "Blocks^Varieties": "Plot[Block]"}, [(2, 3)])
    text = rls_relation_table(build_rls(bibd, plan))
    assert text.splitlines()[-1].startswith('Plot[Block] "1"  "1"    "1"       " "')


def test_crossover_equation(crossover):
    sug = suggest_rls_objects(crossover, [("Sequence", "Subject"), ("Treatment", "Period^Sequence")])
    eq = model_equation(build_rls(crossover, suggestion_plan(crossover, sug)))
    assert eq.fixed == ("Period", "Sequence", "Treatment", "Period:Sequence")
    # Observation is reached through its shortest generating subset
    assert eq.random == ("Subject", "Period:Subject")
