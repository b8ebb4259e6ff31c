import pytest

from simenv import bridge
from simenv.bridge import DecisionPointRegistry, EnvRegistry
from simenv.plugins import HookRegistry

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and report.passed:
        return
    number, title = marker.args
    previous = _criteria.get(number, (title, True))
    _criteria[number] = (title, previous[1] and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def hooks():
    return HookRegistry()


@pytest.fixture
def points():
    return DecisionPointRegistry()


@pytest.fixture
def envs():
    return EnvRegistry()


@pytest.fixture
def no_leaked_contexts():
    yield
    # simulation threads are daemons; give cancelled ones a moment to exit
    import time

    deadline = time.monotonic() + 2
    while bridge.live_simulation_contexts() and time.monotonic() < deadline:
        time.sleep(0.01)
    assert bridge.live_simulation_contexts() == 0
