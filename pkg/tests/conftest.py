import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("fixed", max_examples=1000, derandomize=True, deadline=None,
                          print_blob=True)
settings.load_profile("fixed")

CRITERIA = {
    1: "F4 golden expansion through t^20",
    2: "affine A1 deformed matrix and determinant",
    3: "four-way agreement of inversion methods through t^15",
    4: "C . C~ = id mod t^16, both orders",
    5: "nonnegative coefficients through t^30 in infinite type",
    6: "braid relations on rank-2 subdiagrams",
    7: "longest element monomial (r h_dual, h)",
    8: "hermitian symmetry and mass factorization",
    9: "Kimura-Pestun comparison",
    10: "randomized property suites",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(crit, []).append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, desc in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in runs):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n:2d} [{status}] {desc} ({len(runs or [])} checks)")
