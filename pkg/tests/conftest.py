import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from swarmmorph import scenarios  # noqa: E402
from swarmmorph.engine import Simulation, Strategy  # noqa: E402

ACCEPTANCE_FILE = "test_acceptance.py"


def _finished_run(scenario, strategy=Strategy.PROPOSED):
    return Simulation(scenario, strategy=strategy).run()


@pytest.fixture(scope="session")
def runs():
    """Full missions for every built-in scenario and both strategies, computed once."""
    cache = {}

    def get(name, strategy=Strategy.PROPOSED):
        key = (name, Strategy(strategy))
        if key not in cache:
            if name == "left-shifted-mirrored":
                sc = scenarios.left_shifted().mirrored()
            else:
                sc = scenarios.BUILTIN[name]()
            cache[key] = _finished_run(sc, key[1])
        return cache[key]

    return get


# ---------------------------------------------------------------- summary

_results: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if ACCEPTANCE_FILE not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        name = report.nodeid.split("::")[-1]
        _results[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_results):
        status, detail = _results[name]
        line = f"{status} {name}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
