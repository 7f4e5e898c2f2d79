import numpy as np
import pytest

from solitonlab.grid import GridSpec
from solitonlab.profile import NonlinearityParams


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def cubic():
    return NonlinearityParams(1.0, 1.0)


def gaussian(grid, center=0.0, width=1.0, k=0.3):
    x = grid.x
    return np.exp(-((x - center) / width) ** 2) * np.exp(1j * k * x) * (1 + 0.2 * x)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
