import numpy as np
import pytest

from netjunction import QuadraticFlux, uniform_network


@pytest.fixture
def f():
    return QuadraticFlux()


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture
def merge_net():
    return uniform_network(2, 1, 0.6)


# One summary line per acceptance criterion, aggregated over its tests.
_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test belongs to acceptance criterion n")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria.setdefault(marker, []).append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(outcome == "passed" for _, outcome in results)
        failed = [nodeid.split("::", 1)[1] for nodeid, outcome in results if outcome != "passed"]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(sorted(set(failed)))
        terminalreporter.write_line(line)
