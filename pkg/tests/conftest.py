import numpy as np
import pytest

from ewmirror.core import builtin_rb87
from ewmirror.optics import InterfaceGeometry

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def rb87():
    return builtin_rb87()


@pytest.fixture
def near_critical():
    return InterfaceGeometry.near_critical(1.51, 0.01, 780e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
