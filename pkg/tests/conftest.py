import numpy as np
import pytest

from coreclust import Dataset, generate_gaussian_mixture, triangle_mixture
from oracles import ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def synthetic150():
    return generate_gaussian_mixture(triangle_mixture(), 150, 0)


@pytest.fixture
def line4():
    return Dataset(np.array([[-2.0], [-1.0], [1.0], [2.0]]))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
