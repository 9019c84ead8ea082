import numpy as np
import pytest

from app import create_app
from app.bloch import densities, spherical_grid
from app.designs import get_design
from app.verification import random_states


@pytest.fixture
def app():
    app = create_app('config.TestingConfig')
    with app.app_context():
        yield app


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture(scope='session')
def icosahedral():
    return get_design('icosahedral')


@pytest.fixture(scope='session')
def clifford():
    return get_design('clifford')


@pytest.fixture(scope='session')
def mixed_states():
    return random_states(20, seed=7)


@pytest.fixture(scope='session')
def default_grid():
    return densities(spherical_grid())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
