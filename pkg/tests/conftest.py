"""Acceptance bookkeeping: one PASS/FAIL line per numbered criterion."""

import pytest

_TITLES = {}
_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): test belongs to a numbered acceptance criterion"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _TITLES[number] = title
            _OUTCOMES.setdefault(number, [])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            status = "xfail" if report.skipped else "xpass"
        else:
            status = report.outcome
        _OUTCOMES[mark.args[0]].append((item.name, status, getattr(report, "wasxfail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        parts = _OUTCOMES[number]
        ok = bool(parts) and all(status == "passed" for _, status, _ in parts)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {_TITLES[number]}")
        for name, status, reason in parts:
            if status != "passed":
                note = f" ({reason})" if reason else ""
                tr.write_line(f"        {name}: {status}{note}")
