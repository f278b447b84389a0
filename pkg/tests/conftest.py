from pathlib import Path

import numpy as np
import pytest

from helpers import random_soft

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def soft_data():
    return random_soft()


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion; parametrised cases are folded together
    crit = {}
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            name = rep.nodeid.split("::")[-1].split("[")[0]
            ok, details = crit.get(name, (True, []))
            detail = dict(rep.user_properties).get("detail", "")
            crit[name] = (ok and outcome == "passed", details + ([detail] if detail else []))
    if crit:
        terminalreporter.section("acceptance criteria")
        for name in sorted(crit):
            ok, details = crit[name]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {' | '.join(details)}")
