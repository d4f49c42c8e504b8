"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

from collections import defaultdict

import pytest

CRITERIA = {
    1: "vacuum-ancilla attenuation",
    2: "nonlinear sign element",
    3: "half-reflecting sign element",
    4: "Mach-Zehnder core filter",
    5: "polarization filter matrix",
    6: "entangling circular inputs",
    7: "quantum phase gate",
    8: "oracle equivalence",
    9: "property suite",
    10: "DSL round-trip and diagnostics",
    11: "negative control",
}

_node_criterion: dict[str, int] = {}
_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            _node_criterion[item.nodeid] = marker.args[0]


def pytest_runtest_logreport(report):
    n = _node_criterion.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[n].append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2} {title:<34} {status} ({len(results or [])} tests)")
