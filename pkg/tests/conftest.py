import numpy as np
import pytest

from tdfs.evolve import IntegratorConfig, initial_state, integrate
from tdfs.reservoir import SqueezeSchedule
from tdfs.synthesis import ControlLaw

NU = 2 * np.pi / 3

# One line per acceptance criterion, filled by test_acceptance and echoed at the end.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def driven():
    return SqueezeSchedule(mu=1.0, nu=NU, o=1e-3)


@pytest.fixture(scope="session")
def still():
    return SqueezeSchedule(mu=1.0, nu=0.0, o=1e-3)


@pytest.fixture(scope="session")
def controlled_run(driven):
    cfg = IntegratorConfig(dt=1e-3, t_max=5.0)
    return integrate(initial_state(driven), driven, ControlLaw.exact(), cfg)


@pytest.fixture(scope="session")
def free_run(driven):
    cfg = IntegratorConfig(dt=1e-3, t_max=5.0)
    return integrate(initial_state(driven), driven, ControlLaw.none(), cfg)
