from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

CRITERIA = {
    1: "continued fractions reproduce the quoted expansions",
    2: "e+pi mu0 table rows and flags",
    3: "e*pi mu0 table rows and flags",
    4: "pi+pi^2 mu0 table rows",
    5: "kernel closed form equals brute force, bound holds",
    6: "rational saturation and rational-like verdict",
    7: "irrational decay envelope and irrational-like verdict",
    8: "determinant identity and sandwich inequalities",
    9: "best-approximation minimality of convergents",
    10: "nonvanishing scans certify positive minima",
    11: "Kronecker fast path equals brute-force minimal q",
    12: "byte-identical table output across runs",
}

_outcomes: dict[int, list[tuple[str, bool]]] = {}


def mp_fraction(x) -> Fraction:
    """Exact rational value of an mpmath mpf (sign included)."""
    s, m, e, _ = x._mpf_
    v = Fraction(m) * Fraction(2) ** e
    return -v if s else v


@pytest.fixture
def mp2000():
    with mpmath.workprec(2000):
        yield


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    n = getattr(report, "criterion", None)
    if n is not None:
        _outcomes.setdefault(n, []).append((report.nodeid, report.passed))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        runs = _outcomes.get(n)
        if not runs:
            tr.write_line(f"criterion {n:>2}: NOT RUN  {CRITERIA[n]}")
            continue
        failed = [nid.split("::")[-1] for nid, ok in runs if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n:>2}: {status}  {CRITERIA[n]} ({len(runs) - len(failed)}/{len(runs)} checks)"
        if failed:
            line += "; failing: " + ", ".join(failed)
        tr.write_line(line)
