"""Collect acceptance-criterion outcomes and print one line per criterion."""

from __future__ import annotations

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_ac"):
        _ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[1][2:])):
        label = name.split("_", 2)[2].replace("_", " ")
        terminalreporter.write_line(f"AC-{name.split('_')[1][2:]} {label}: {_ACCEPTANCE[name]}")
