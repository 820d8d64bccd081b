"""Acceptance reporting: one PASS/FAIL/SKIP line per criterion at session end."""

import pytest

_results: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if not marker:
        return
    key, title = marker
    if report.when == "call" or report.skipped or (report.when == "setup" and report.failed):
        outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        if key not in _results or outcome == "FAIL":
            _results[key] = (outcome, title)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m:
        item.user_properties.append(("criterion", (str(m.args[0]), m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results, key=lambda k: int(k)):
        outcome, title = _results[key]
        terminalreporter.write_line(f"criterion {key}: {outcome}  {title}")
