"""Collects acceptance outcomes and prints one line per criterion."""

import pytest

_OUTCOMES: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    key, title = marker.args
    entry = _OUTCOMES.setdefault(key, {"title": title, "passed": True, "cases": 0})
    if report.when == "call":
        entry["cases"] += 1
    if report.failed:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_OUTCOMES, key=lambda k: int(k[2:])):
        entry = _OUTCOMES[key]
        status = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(f"{key} {status}  {entry['title']} ({entry['cases']} case(s))")
