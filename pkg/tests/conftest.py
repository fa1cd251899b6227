import math

import numpy as np
import pytest

from cvdv import spectrum

SQRT_HALF = 1.0 / math.sqrt(2.0)

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s[7:9])):
        terminalreporter.write_line(line)


def tmsv_vector(lam, dim):
    """Un-renormalized truncated TMSV amplitudes ``sqrt(1-lam^2) lam^n``."""
    return math.sqrt(1.0 - lam * lam) * lam ** np.arange(dim, dtype=float)


@pytest.fixture
def tmsv():
    return tmsv_vector


@pytest.fixture(scope="session")
def db_grid():
    return [spectrum.db_to_lambda(db) for db in np.linspace(0.25, 15.0, 40)]
