"""Shared fixtures: small lattices, seeded configurations and gamma representations."""

import numpy as np
import pytest

from src.clifford import build_gamma_rep
from src.fields import random_config
from src.lattice import TorusLattice, flux_background


def _flux_matrix(dim: int, **planes: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=int)
    for key, value in planes.items():
        u, v = int(key[1]), int(key[2])
        m[u, v], m[v, u] = value, -value
    return m


@pytest.fixture
def flux():
    """Antisymmetric flux matrix from keywords such as ``p01=2``."""
    return _flux_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rep4():
    return build_gamma_rep(4)


@pytest.fixture
def rep3():
    return build_gamma_rep(3)


@pytest.fixture
def lat4():
    return TorusLattice(sizes=(6, 5, 4, 6), spacings=(1.0, 0.8, 1.2, 0.9))


@pytest.fixture
def lat3():
    return TorusLattice(sizes=(6, 5, 4), spacings=(1.0, 0.8, 1.2))


@pytest.fixture
def config4(lat4):
    """Random 4-d configuration on an even-flux background."""
    return random_config(lat4, flux_background(lat4, _flux_matrix(4, p01=2, p23=-2)), seed=7)


@pytest.fixture
def config3(lat3):
    return random_config(lat3, flux_background(lat3, _flux_matrix(3, p01=2)), seed=11)
