from dataclasses import replace

import numpy as np
import pytest

from cavity_ssi.dynamics import default_grid, evolve
from cavity_ssi.model import FIG2_PARAMS

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def fig2(delta_tau):
    return replace(FIG2_PARAMS, delta_tau=delta_tau)


@pytest.fixture(scope="session")
def traj0():
    return evolve(fig2(0.0), default_grid(FIG2_PARAMS))


@pytest.fixture(scope="session")
def traj60():
    return evolve(fig2(60.0), default_grid(FIG2_PARAMS))


@pytest.fixture(scope="session", params=[0.0, 60.0], ids=["dt0", "dt60"])
def trajectory(request, traj0, traj60):
    return {0.0: traj0, 60.0: traj60}[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line[1])
