from pathlib import Path

import pytest

from designhasse import build_layout
from designhasse.datasets import bibd_6_10_3, crossover_design, factorial_2p4, splitplot_design

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def splitplot():
    return build_layout(splitplot_design().table)


@pytest.fixture(scope="session")
def factorial():
    return build_layout(factorial_2p4().table)


@pytest.fixture(scope="session")
def bibd():
    return build_layout(bibd_6_10_3().table)


@pytest.fixture(scope="session")
def crossover():
    return build_layout(crossover_design().table)


@pytest.fixture
def golden():
    return lambda name: (GOLDEN / name).read_text(encoding="utf-8")


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid and "[" in report.nodeid:
        _acceptance[report.nodeid.split("[", 1)[1].rstrip("]")] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.failed and "test_acceptance.py" in report.nodeid:
        _acceptance[report.nodeid.split("[", 1)[-1].rstrip("]")] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k.split("-")[0][1:])):
        terminalreporter.write_line(f"{_acceptance[key]}  {key}")
