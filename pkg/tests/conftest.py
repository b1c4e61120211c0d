import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sirdb.fixtures import load_fixture  # noqa: E402

_criteria: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    results = _criteria.setdefault(label, [])
    if report.when == "call" or report.failed:
        results.append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s.split(":")[0])):
        results = _criteria[label]
        ok = results and all(r == "passed" for r in results)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {label}")


@pytest.fixture
def sp_session():
    """Suppliers-and-parts fixture loaded into a fresh standard-mode session."""
    return load_fixture("s-p")
