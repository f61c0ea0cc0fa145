"""Acceptance criteria 1-9, one test each.

Each result line is printed and also collected for the terminal summary, so
``pytest`` shows the PASS/FAIL table without ``-s``."""
import pytest

from affchar.acceptance import CRITERIA, run_one

RESULTS = []


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_one(number)
    RESULTS.append(result.line())
    print(result.line())
    assert result.ok, result.detail
    assert result.in_budget, f"{result.seconds:.1f}s over the {result.budget:g}s budget"
