import numpy as np
import pytest

import minkhill as mk

FOURIER_TERMS = [(2, 0.1, 0.0), (4, 0.02, 0.0)]


@pytest.fixture(scope="session")
def euclid():
    return mk.LpProfile(2.0)


@pytest.fixture(scope="session")
def lp3():
    return mk.LpProfile(3.0)


@pytest.fixture(scope="session")
def lp15():
    return mk.LpProfile(1.5)


@pytest.fixture(scope="session")
def lp5():
    return mk.LpProfile(5.0)


@pytest.fixture(scope="session")
def ellipse():
    return mk.EllipseProfile(2.0, 0.5)


@pytest.fixture(scope="session")
def fourier():
    return mk.RadialFourierProfile(1.0, FOURIER_TERMS)


@pytest.fixture(scope="session")
def glued3():
    return mk.RadonGluedProfile(3.0)


@pytest.fixture(scope="session")
def form():
    return mk.STANDARD_FORM


def rng(seed=0):
    return np.random.default_rng(seed)


def random_nonzero(n, seed=0, scale=3.0):
    g = rng(seed)
    v = g.uniform(-scale, scale, size=(n, 2))
    small = np.hypot(v[:, 0], v[:, 1]) < 1e-3
    v[small] = (1.0, 0.5)
    return v
