import pytest

from geocentroid.trajectory import PeriodKey
from helpers import make_registry, synth_dataset

_acceptance_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): acceptance criterion check")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        _acceptance_results.append((marker, report.passed, report.duration))


@pytest.fixture(autouse=True)
def _record_acceptance(request):
    m = request.node.get_closest_marker("acceptance")
    if m is not None:
        request.node.user_properties.append(("acceptance", (m.args[0], m.args[1])))
    yield


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    merged = {}
    for (number, text), passed, duration in _acceptance_results:
        _, ok, total, cases = merged.get(number, (text, True, 0.0, 0))
        merged[number] = (text, ok and passed, total + duration, cases + 1)
    terminalreporter.section("acceptance criteria")
    for number in sorted(merged):
        text, ok, total, cases = merged[number]
        extra = f", {cases} cases" if cases > 1 else ""
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {text} ({total:.2f}s{extra})")


@pytest.fixture
def small_registry():
    return make_registry(
        ("g1", 10.0, 20.0),
        ("g2", 20.0, 40.0),
        ("g3", -30.0, 150.0),
        ("cam", 52.2053, 0.1218),
        ("oxf", 51.7548, -1.2544),
    )


@pytest.fixture(scope="session")
def synth_10k(tmp_path_factory):
    """10,000 records over 20 years with citation histories and custom weights."""
    d = tmp_path_factory.mktemp("synth10k")
    plan = [(PeriodKey(y), 500) for y in range(2000, 2020)]
    return synth_dataset(d, plan, seed=11)
