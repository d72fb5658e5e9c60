import numpy as np
import pytest

from fracklein.harness import builtin_initial_data, default_grid

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def smooth_1d():
    grid = default_grid("eq-5.1.1", 128)
    return grid, builtin_initial_data("eq-5.1.1", grid)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
