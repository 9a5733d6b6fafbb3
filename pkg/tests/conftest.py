import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "Fixture reproduction (T1-T4, T31-T32 within 1e-12, < 1 s)",
    2: "Closed-form audit (cross_validate both sets, <= 1e-10, < 1 s)",
    3: "Tabulated roots (numeric within 2e-5, exact within 1e-12, < 2 min)",
    4: "Period-6 absence (step 1e-4 scan, residual 1e-3, < 5 min)",
    5: "Axis, pitch, radius, step angle (within 1e-10)",
    6: "Projection symmetry after z-alignment (within 1e-9)",
    7: "Canonical oracle (rms <= 1e-9 over 30; misalignment >= 0.01 for m <= 100)",
    8: "Property suite (edges, O(3)/SO(3), involution, chirality antisymmetry)",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test backs acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[marker.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            tr.write_line(f"criterion {n}: NOT RUN  {title}")
            continue
        ok = all(passed for _, passed in runs)
        failed = [name for name, passed in runs if not passed]
        tail = f"  (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}{tail}")
