from pathlib import Path

import pytest

from chtest.distiller import distill_initial
from chtest.frontend import load_snapshot
from chtest.model import ResolutionMode

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_program(name):
    return load_snapshot(FIXTURES / name)


def fixture_model(name, mode="static", constructors=False):
    m = ResolutionMode.poly(constructors) if mode == "poly" else ResolutionMode.static(constructors)
    return distill_initial(fixture_program(name), m)


@pytest.fixture
def foobar():
    return fixture_program("fig2")


@pytest.fixture
def type_code_before():
    return fixture_program("fig4_before")


@pytest.fixture
def type_code_after():
    return fixture_program("fig4_after")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
