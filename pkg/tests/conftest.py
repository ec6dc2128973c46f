import numpy as np
import pytest
from hypothesis import strategies as st

from fockphase import fock_core as fc

_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one acceptance line: report(criterion, ok, detail)."""

    def _report(criterion, ok, detail):
        _ACCEPTANCE.append((criterion, ok, detail))
        print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def dense_state(amps):
    return fc.SectorState.from_amplitudes(np.asarray(amps, dtype=complex))


@st.composite
def sector_states(draw, min_n=1, max_n=40):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return fc.SectorState.from_amplitudes(amps)


angles = st.floats(-10.0, 10.0, allow_nan=False)
