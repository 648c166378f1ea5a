import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blpsim.process import ProcessModel  # noqa: E402


@pytest.fixture
def default_model():
    return ProcessModel.default_setup()


@pytest.fixture
def short_model():
    """x0 = 10 mm: the fiber overshoots the delay, so t1 < t_f and all three rates appear."""
    return ProcessModel.default_setup(x0_mm=10.0)


ACCEPTANCE: dict = {}


@pytest.fixture
def report():
    """Record one acceptance verdict: report(n, ok, detail)."""

    def _report(n, ok, detail):
        ACCEPTANCE[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}")
