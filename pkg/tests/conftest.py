import math

import pytest

from qsignal.classical import SignalingSpec
from qsignal.hilbert import UnitaryParams
from qsignal.qsignaling import QSchemeConfig

from oracles import PAPER_LEAVES

PI = math.pi
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and rep.when == "call":
        _CRITERIA.append((mark.args[0], mark.args[1], rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, outcome in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {text}")


@pytest.fixture
def paper_spec():
    return SignalingSpec(0.5, PAPER_LEAVES)


@pytest.fixture
def paper_chance():
    return UnitaryParams(PI / 2, PI / 6, PI / 3)


@pytest.fixture
def paper_config(paper_spec, paper_chance):
    return QSchemeConfig(paper_spec, paper_chance)
