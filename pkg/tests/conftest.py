import pytest

from graphdyn import DensitySchedule, PowerLaw


@pytest.fixture
def pl02():
    return PowerLaw(0.2)


@pytest.fixture
def sched05():
    return DensitySchedule(0.5)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
