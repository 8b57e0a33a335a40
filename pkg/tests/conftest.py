import numpy as np
import pytest
from hypothesis import strategies as st

from gestark import StarkRegistry

# Placeholder hyperfine constant for tests; the Ge values are not used anywhere.
A_FIXTURE = 1.0e8  # Hz
F0 = 9.6e9  # Hz


@pytest.fixture(scope="session")
def registry():
    return StarkRegistry.load()


def unit_vectors():
    return (
        st.tuples(*[st.floats(-1, 1, allow_nan=False) for _ in range(3)])
        .filter(lambda v: np.linalg.norm(v) > 1e-3)
        .map(lambda v: np.asarray(v) / np.linalg.norm(v))
    )


# -- acceptance reporting -----------------------------------------------------

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    detail = "" if ok else str(call.excinfo.value).splitlines()[0][:160]
    _CRITERIA.append((number, title, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_CRITERIA):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
