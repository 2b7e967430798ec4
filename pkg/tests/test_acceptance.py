"""Runs every acceptance criterion at its stated tolerance and prints one PASS/FAIL line each."""

import pytest

from specroute import repro


@pytest.fixture(scope="module", autouse=True)
def _warm():
    repro.warm_kernels()


def _marks(number):
    return [pytest.mark.slow] if number == 11 else []


@pytest.mark.parametrize(
    "number", [pytest.param(n, id=f"criterion_{n:02d}", marks=_marks(n)) for n in repro.ORDER]
)
def test_criterion(number, capsys):
    res = repro.CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
    assert res.in_budget, f"took {res.elapsed:.1f}s, budget {res.budget}s"
