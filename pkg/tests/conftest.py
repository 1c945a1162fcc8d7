import pytest

from helpers import make_network


@pytest.fixture
def single():
    return make_network(["A", "B"], [("r", "A", "B", "O", 0.5, 0.5)])


@pytest.fixture
def chain():
    """r1(A,B->I, .5/.5), r2(I,C->O, .25/.75)."""
    return make_network(
        ["A", "B", "C"],
        [("r1", "A", "B", "I", 0.5, 0.5), ("r2", "I", "C", "O", 0.25, 0.75)],
        intermediates=["I"],
    )


@pytest.fixture
def fan_out():
    """A feeds two rules whose results merge downstream."""
    return make_network(
        ["A", "B", "C"],
        [
            ("r1", "A", "B", "I1", 0.3, 0.7),
            ("r2", "C", "A", "I2", 0.6, 0.4),
            ("r3", "I1", "I2", "O", 0.8, 0.2),
        ],
        intermediates=["I1", "I2"],
    )


# -- acceptance summary ---------------------------------------------------

_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        _acceptance.append(report)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for report in _acceptance:
        name = report.nodeid.split("::")[-1]
        terminalreporter.write_line(f"{report.outcome.upper():7} {name}")
