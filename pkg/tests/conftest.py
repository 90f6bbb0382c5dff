import math

import numpy as np
import pytest
from hypothesis import strategies as st

from fourphoton.source import wavelength_to_spec


@pytest.fixture
def spec():
    """780 nm photons with 5 nm FWHM, all arriving together."""
    return wavelength_to_spec(780e-9, 5e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_unitary(rng, n=4):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def random_phases(rng):
    return tuple(rng.uniform(0, 2 * math.pi, 2))


PATH_UM = st.floats(-250, 250, allow_nan=False)


@st.composite
def clustered_paths(draw):
    """Four path lengths where later ports may sit a tiny offset away from earlier ones."""
    xs = [draw(PATH_UM)]
    for _ in range(3):
        if draw(st.booleans()):
            offset = draw(st.sampled_from([0.0]) | st.floats(-12, 1).map(lambda e: 10.0**e))
            xs.append(xs[draw(st.integers(0, len(xs) - 1))] + offset)
        else:
            xs.append(draw(PATH_UM))
    return xs


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
