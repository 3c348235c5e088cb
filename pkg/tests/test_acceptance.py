"""Acceptance battery: one pass/fail line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines live;
they are also collected in the terminal summary.
"""
import os

import pytest

from disfermion.acceptance import CRITERIA, run_criterion

JOBS = int(os.environ.get("DISFERMION_JOBS", "1"))

# the unrestricted and non-intersecting path sums differ; see test_observables
KNOWN_FAILING = {4}

LINES = {}


def _param(n):
    marks = [pytest.mark.xfail(strict=True, reason="unrestricted path sum differs from the disjoint one")] \
        if n in KNOWN_FAILING else []
    return pytest.param(n, marks=marks, id=f"criterion_{n}")


@pytest.mark.parametrize("number", [_param(n) for n in CRITERIA])
def test_criterion(number, record_property):
    res = run_criterion(number, jobs=JOBS)
    LINES[number] = res.line()
    print(res.line())
    record_property("line", res.line())
    assert res.ok, res.line()


