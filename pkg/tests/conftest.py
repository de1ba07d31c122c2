import numpy as np
import pytest

ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def verdict():
    """Record one acceptance line; the line is printed whether or not the test passes."""
    def record(label, ok, info=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{info}]" if info else "")
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
