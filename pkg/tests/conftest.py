import math

import pytest

from latvol import catalog

CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    CRITERIA.setdefault(n, [title, True])
    CRITERIA[n][1] &= rep.passed


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, ok = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def entries():
    return {name: catalog.get(name) for name in catalog.names()}


@pytest.fixture(scope="session")
def square():
    return catalog.get("square").map


@pytest.fixture(scope="session")
def hexagonal():
    return catalog.get("hexagonal").map


TWO_PI = 2 * math.pi
