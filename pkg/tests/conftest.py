import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
sys.path.insert(0, str(Path(__file__).parent / "fixtures"))

FIXTURES = Path(__file__).parent / "fixtures"

# criterion number -> title, and the outcomes of the tests tagged with it
CRITERIA = {}
OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    CRITERIA[number] = title
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            status = "FAIL (expected, see reason)"
        elif rep.skipped:
            status = "SKIP"
        else:
            status = "PASS" if rep.passed else "FAIL"
        OUTCOMES.setdefault(number, []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(OUTCOMES):
        parts = OUTCOMES[number]
        statuses = {s for _, s in parts}
        if statuses == {"PASS"}:
            verdict = "PASS"
        elif statuses == {"SKIP"}:
            verdict = "SKIP"
        elif any(s.startswith("FAIL") for s in statuses):
            verdict = "FAIL"
        else:
            verdict = "PASS (parts skipped)"
        tr.write_line(f"criterion {number:2d}: {verdict:5s} {CRITERIA[number]}")
        if len(parts) > 1 or verdict != "PASS":
            for name, status in parts:
                tr.write_line(f"              {status:28s} {name}")


@pytest.fixture(scope="session")
def sine_ar1():
    import csv

    import numpy as np

    with (FIXTURES / "sine_ar1.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["y"]) for r in rows])


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
