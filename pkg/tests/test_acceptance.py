"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line with expected and observed values; run
``pytest -s tests/test_acceptance.py`` to see them.
"""

import pytest

from gridfloer.acceptance import CRITERIA


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 11)])
def test_criterion(check):
    result = check(quick=False, seed=0)
    print(result.line())
    for detail in result.details:
        print("    " + detail)
    assert result.passed, result.line()
