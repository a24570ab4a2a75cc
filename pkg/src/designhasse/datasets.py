"""Example designs used throughout the docs and tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .design import DesignTable, check_design, write_flags_sidecar


@dataclass(frozen=True)
class FixtureDesign:
    name: str
    table: DesignTable
    provenance: str

    @property
    def random_flags(self) -> tuple[bool, ...]:
        return self.table.random_flags()

    def to_csv(self) -> str:
        return self.table.to_csv()

    def flags_text(self) -> str:
        return write_flags_sidecar(self.table)


def splitplot_design() -> FixtureDesign:
    """Split-plot in a row-column design: 3 benches x 4 plants x 3 leaf layers."""
    bench = [b for b in (1, 2, 3) for _ in range(12)]
    plant = [p for p in range(1, 13) for _ in range(3)]
    lyr = ["Top", "Middle", "Bottom"] * 12
    soil = [3, 3, 3, 2, 2, 2, 1, 1, 1, 0, 0, 0, 0, 0, 0, 2, 2, 2,
            1, 1, 1, 3, 3, 3, 3, 3, 3, 0, 0, 0, 2, 2, 2, 1, 1, 1]
    treat = [2, 0, 1, 1, 0, 2, 0, 1, 2, 1, 0, 2, 0, 2, 1, 0, 2, 1,
             1, 2, 0, 1, 2, 0, 0, 1, 2, 2, 1, 0, 2, 1, 0, 2, 0, 1]
    leaf = list(range(1, 37))
    table = DesignTable.from_columns(
        {"Bench": bench, "Plant": plant, "Lyr": lyr, "Soil": soil,
         "Treat": treat, "Leaf": leaf},
        random=("Bench", "Plant", "Lyr", "Leaf"),
    )
    return FixtureDesign("splitplot", table,
                         "36-leaf split-plot in a row-column design, pre-randomisation allocation")


def factorial_2p4() -> FixtureDesign:
    """Single replicate of a 2^4 factorial plus a Run index; all fixed."""
    runs = list(itertools.product((10, 15), (220, 240), (50, 80), (10, 12)))
    table = DesignTable.from_columns({
        "Catalyst": [r[0] for r in runs],
        "Temperature": [r[1] for r in runs],
        "Pressure": [r[2] for r in runs],
        "Concentration": [r[3] for r in runs],
        "Run": list(range(1, 17)),
    })
    return FixtureDesign("factorial", table, "2^4 process development factorial, 16 runs")


BIBD_BLOCKS = (
    (1, 2, 3), (1, 2, 4), (1, 3, 5), (1, 4, 6), (1, 5, 6),
    (2, 3, 6), (2, 4, 5), (2, 5, 6), (3, 4, 5), (3, 4, 6),
)


def bibd_6_10_3() -> FixtureDesign:
    """Balanced incomplete block design with v=6, b=10, k=3, r=5, lambda=2."""
    blocks, varieties = [], []
    for b, block in enumerate(BIBD_BLOCKS, start=1):
        for v in block:
            blocks.append(b)
            varieties.append(v)
    table = DesignTable.from_columns({
        "Blocks": blocks,
        "Varieties": varieties,
        "Plots": list(range(1, len(blocks) + 1)),
    })
    return FixtureDesign("bibd", table, "wheat variety trial, BIBD(6, 10, 3) with a plot index")


WILLIAMS_3 = (
    ("CHX1", "CHX2", "saline"), ("CHX2", "saline", "CHX1"), ("saline", "CHX1", "CHX2"),
    ("CHX1", "saline", "CHX2"), ("CHX2", "CHX1", "saline"), ("saline", "CHX2", "CHX1"),
)


def crossover_design() -> FixtureDesign:
    """Three-period crossover: 6 Williams sequences x 4 subjects, Subject random.

    A structural stand-in for the dental study; the real allocation of
    patients to sequences is not reproduced.
    """
    cols: dict[str, list] = {k: [] for k in
                             ("Sequence", "Subject", "Period", "Treatment", "Observation")}
    obs = 0
    for subject in range(1, 25):
        seq = (subject - 1) // 4 + 1
        for period in (1, 2, 3):
            obs += 1
            cols["Sequence"].append(seq)
            cols["Subject"].append(subject)
            cols["Period"].append(period)
            cols["Treatment"].append(WILLIAMS_3[seq - 1][period - 1])
            cols["Observation"].append(obs)
    table = DesignTable.from_columns(cols, random=("Subject",))
    return FixtureDesign("crossover", table,
                         "three-period crossover with 24 subjects in 6 sequences (structural stand-in)")


FIXTURES = {
    "splitplot": splitplot_design,
    "factorial": factorial_2p4,
    "bibd": bibd_6_10_3,
    "crossover": crossover_design,
}


def get_fixture(name: str) -> FixtureDesign:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {', '.join(FIXTURES)}") from None


def all_fixtures() -> list[FixtureDesign]:
    return [make() for make in FIXTURES.values()]


def fixture_warnings(fixture: FixtureDesign):
    return check_design(fixture.table)
