import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "normal-scale correction constant",
    2: "EIBF ratio maximum",
    3: "exponential theoretical sup",
    4: "Poisson-vs-Geometric per-MTS values",
    5: "trained-factor identity suite",
    6: "bound-chain sandwich",
    7: "empirical SP Bayes factor by posterior reuse",
    8: "empirical sup convergence",
    9: "robust bound against IBF lower bound",
    10: "ANOVA identities",
    11: "Cox-data direction",
    12: "overflow robustness",
    13: "simulation determinism",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): acceptance criterion number n")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes.setdefault(marker.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n:2d} NOT RUN  {title}")
            continue
        failed = [name for name, out in results if out != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n:2d} {status:8s} {title} ({len(results) - len(failed)}/{len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(failed)
        tr.write_line(line)
