import numpy as np
import pytest
from hypothesis import settings

from poroplate.forms import MaterialParams, build_operators
from poroplate.mesh import build_mesh

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return MaterialParams()


@pytest.fixture(scope="session")
def mesh2():
    return build_mesh(2, 2, 2, 2)


@pytest.fixture(scope="session")
def ops2(mesh2, params):
    return build_operators(mesh2, params)


@pytest.fixture(scope="session")
def mesh4():
    return build_mesh(4, 4, 4, 2)


@pytest.fixture(scope="session")
def ops4(mesh4, params):
    return build_operators(mesh4, params)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def mms_table():
    from poroplate.mms import convergence_study

    return convergence_study((2, 4, 8))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
