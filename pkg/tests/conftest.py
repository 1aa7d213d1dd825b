from __future__ import annotations

from collections import defaultdict

import pytest

CRITERIA = {
    1: "spread correctness",
    2: "group structure",
    3: "singer subgroup",
    4: "orbit partition of lines",
    5: "optimum distance full flag code construction",
    6: "non-disjoint orbit example",
    7: "optimum-distance routes agree on generated codes",
    8: "maximum size bound",
    9: "no transitive subgroup of order 10 (q=3, k=2)",
    10: "channel properties",
}

_criterion_of: dict[str, int] = {}
_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number covered by the test")


def pytest_collection_modifyitems(config, items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _criterion_of[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[n].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criterion_of:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        got = _outcomes.get(n, [])
        if not got or all(o == "skipped" for o in got):
            status = "NOT RUN"
        elif "failed" in got:
            status = "FAIL"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {n:2d} {label}: {status}")


@pytest.fixture(scope="session")
def towers():
    from flagcodes.galois import build_tower

    cache = {}

    def get(p, e, k):
        if (p, e, k) not in cache:
            cache[p, e, k] = build_tower(p, e, k)
        return cache[p, e, k]
    return get
