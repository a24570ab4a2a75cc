import numpy as np

from designhasse import DesignTable, build_layout, detect_confounding
from designhasse.confound import RTOL, rank, residual_df_rank


def test_splitplot_total_and_flags(splitplot, golden):
    report = detect_confounding(splitplot)
    assert report.total_confounded_df == 6
    assert set(report.flagged) == {
        "Bench^Lyr", "Bench^Soil", "Bench^Treat", "Lyr^Soil", "Lyr^Treat",
        "Soil^Treat", "Bench^Lyr^Treat",
    }
    assert report.format() == golden("splitplot_confound.txt")


def test_rank_df_of_main_effects(splitplot):
    # orthogonal main effects: rank df equals levels - 1
    for name in ("Bench", "Lyr", "Soil", "Treat"):
        obj = splitplot.find(name)
        assert residual_df_rank(obj.id, splitplot).df_rank == obj.n_levels - 1


def test_rank_df_matches_subtraction_when_orthogonal(factorial):
    for o in factorial.objects:
        assert residual_df_rank(o.id, factorial).df_rank == o.df


def test_clean_designs_have_no_confounding(factorial, bibd):
    assert detect_confounding(factorial).total_confounded_df == 0
    assert detect_confounding(bibd).total_confounded_df == 0
    assert detect_confounding(bibd).flagged == []


def test_include_subset(splitplot):
    ids = [o.id for o in splitplot.objects if o.name in
           ("Mean", "Bench", "Soil", "Treat", "Bench^Soil", "Lyr^Soil", "Soil^Treat",
            "Bench^Lyr^Soil^Treat")]
    report = detect_confounding(splitplot, include=ids)
    assert len(report.rows) == len(ids) - 1


def test_headline_singular():
    from designhasse.confound import ConfoundReport
    assert ConfoundReport((), 1).headline() == "There is 1 confounded degree of freedom"


def test_rank_threshold_is_relative():
    m = np.eye(3) * 1e6
    m[2, 2] = 1e6 * RTOL / 100
    assert rank(m) == 2


def test_single_unit():
    s = build_layout(DesignTable.from_columns({"A": [1]}))
    assert detect_confounding(s).total_confounded_df == 0
