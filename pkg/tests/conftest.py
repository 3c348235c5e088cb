import os
import tempfile

import pytest

# reuse monomial tables across runs
os.environ.setdefault("DISFERMION_CACHE", os.path.join(tempfile.gettempdir(), "disfermion-cache"))


@pytest.fixture(scope="session")
def small_family():
    from disfermion.monomials import build_family

    return build_family(6, 20)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
