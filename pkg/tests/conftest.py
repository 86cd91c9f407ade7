import re
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from measpart import bernoulli, full_shift, make_system, markov_measure  # noqa: E402
from measpart.symbolic import Alphabet  # noqa: E402
import oracles as O  # noqa: E402

F = Fraction


@pytest.fixture
def sigma2():
    return full_shift(2)


@pytest.fixture
def fair(sigma2):
    return bernoulli(sigma2, [F(1, 2), F(1, 2)])


@pytest.fixture
def golden_sys():
    return make_system(Alphabet((0, 1)), O.GOLDEN_T)


@pytest.fixture
def golden(golden_sys):
    return markov_measure(golden_sys, O.GOLDEN_P)


@pytest.fixture
def block_sys():
    return make_system(Alphabet((0, 1, 2, 3)), O.BLOCK_T)


@pytest.fixture
def mixture(block_sys):
    return markov_measure(block_sys, O.BLOCK_P, O.BLOCK_PI)


@pytest.fixture
def cycle_sys():
    return make_system(Alphabet((0, 1)), O.CYCLE_T)


@pytest.fixture
def cycle(cycle_sys):
    return markov_measure(cycle_sys, O.CYCLE_P, O.CYCLE_PI)


# one summary line per acceptance criterion

_CRITERIA: dict[int, list[str]] = {}
_TITLES: dict[int, str] = {}
_PAT = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _PAT.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    _TITLES.setdefault(k, m.group(2).split("[")[0].replace("_", " "))
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(k, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok = all(o == "passed" for o in _CRITERIA[k])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {k:2d}: {_TITLES[k]}")
