import numpy as np
import pytest

_criteria = []


@pytest.fixture
def rng():
    return np.random.default_rng(20190717)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _criteria.append((number, title, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    merged = {}
    for number, title, outcome in _criteria:
        _, ok, runs = merged.get(number, (title, True, 0))
        merged[number] = (title, ok and outcome == "passed", runs + 1)
    terminalreporter.section("acceptance criteria")
    for number in sorted(merged):
        title, ok, runs = merged[number]
        terminalreporter.write_line(f"AC{number:02d} {'PASS' if ok else 'FAIL'}  {title} ({runs} checks)")
