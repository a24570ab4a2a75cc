import pytest

from designhasse.randexpr import (
    MEAN, Alias, Base, Combine, ExpressionError, Independent, Randomised,
    UnsupportedExpression, Within, format_expr, parse_rand_expr, rand_nest_set,
)

A, B, C = Base("A"), Base("B"), Base("C")


@pytest.mark.parametrize("text, expr", [
    ("A", A),
    ("A^B", Combine((A, B))),
    ("A∧B∧C", Combine((A, B, C))),
    ("A ⊗ B", Independent((A, B))),
    ("A (x) B", Independent((A, B))),
    ("A[B]", Within(A, B)),
    ("{A ⊗ B}[C]", Within(Independent((A, B)), C)),
    ("A ⊗ {B[C]}", Independent((A, Within(B, C)))),
    ("A[B[C]]", Within(A, Within(B, C))),
    ("Leaf={A ⊗ B}[C]", Alias("Leaf", Within(Independent((A, B)), C))),
    ("A -> B", Randomised(A, B)),
])
def test_parse(text, expr):
    assert parse_rand_expr(text) == expr


@pytest.mark.parametrize("text", [
    "A", "A∧B", "A ⊗ B", "A[B]", "{A ⊗ B}[C]", "A ⊗ {B[C]}", "{A∧B}[C]",
    "Leaf={Bench ⊗ Lyr}[Soil]", "Catal∧Conc∧Press∧Temp → Run", "Plant[Bench]",
])
def test_round_trip(text):
    assert format_expr(parse_rand_expr(text)) == text


def test_names_with_spaces():
    assert parse_rand_expr("Leaf layer[Bench]") == Within(Base("Leaf layer"), Base("Bench"))


@pytest.mark.parametrize("text", ["", "A[", "A]", "A ⊗", "{A", "A B[", "[A]", "A=B=C"])
def test_syntax_errors(text):
    with pytest.raises(ExpressionError):
        parse_rand_expr(text)


def test_unknown_names_only_with_names():
    assert parse_rand_expr("Plot[Block]") == Within(Base("Plot"), Base("Block"))
    with pytest.raises(ExpressionError, match="unknown"):
        parse_rand_expr("Plot[Block]", ["Plots", "Blocks"])


@pytest.mark.parametrize("text, expected", [
    ("A", ["Mean"]),
    ("A∧B", ["Mean", "A", "B"]),
    ("A ⊗ B", ["Mean", "A", "B"]),
    ("A[B]", ["Mean", "B"]),
    ("A[B ⊗ C]", ["Mean", "B ⊗ C", "B", "C"]),
    ("{A ⊗ B}[C]", ["Mean", "A[C]", "B[C]", "C"]),
    ("A ⊗ {B[C]}", ["Mean", "A ⊗ C", "B[C]", "A", "C"]),
])
def test_nest_sets(text, expected):
    assert [format_expr(e) for e in rand_nest_set(parse_rand_expr(text))] == expected


def test_mean_nests_nothing():
    assert rand_nest_set(MEAN) == []


def test_unsupported():
    with pytest.raises(UnsupportedExpression):
        rand_nest_set(parse_rand_expr("{A[B]}[C]"))
