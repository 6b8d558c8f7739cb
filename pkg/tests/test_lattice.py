from __future__ import annotations

from math import comb

import numpy as np
import pytest

from src.errors import FluxError, LatticeError
from src.lattice import (
    Cochain,
    TorusLattice,
    chern_numbers,
    coboundary,
    d,
    d_star,
    flux_background,
    hodge_star,
    inner,
    norm,
    plaquette_flux,
    selfdual_project,
)


def random_cochain(lat: TorusLattice, k: int, rng: np.random.Generator) -> Cochain:
    return Cochain(k, rng.normal(size=(comb(lat.dim, k),) + lat.sizes))


@pytest.mark.parametrize(
    "sizes,spacings",
    [((6, 5), (1.0, 1.0)), ((6, 1, 4), (1.0, 1.0, 1.0)), ((6, 3, 4), (1.0, 1.0, 1.0)), ((4, 4, 4), (1.0, 0.0, 1.0)), ((4, 4, 4), (1.0, 1.0))],
)
def test_invalid_lattices_are_rejected(sizes, spacings):
    with pytest.raises(LatticeError):
        TorusLattice(sizes=sizes, spacings=spacings)


def test_geometry(lat4):
    assert lat4.dim == 4
    assert lat4.n_sites == 6 * 5 * 4 * 6
    assert lat4.cell_volume == pytest.approx(1.0 * 0.8 * 1.2 * 0.9)
    assert lat4.lengths == pytest.approx((6.0, 4.0, 4.8, 5.4))
    assert lat4.volume == pytest.approx(6.0 * 4.0 * 4.8 * 5.4)
    assert lat4.zeros(2).shape == (6,) + lat4.sizes


@pytest.mark.parametrize("lattice", ["lat3", "lat4"])
def test_d_squared_vanishes(lattice, request, rng):
    lat = request.getfixturevalue(lattice)
    for k in range(lat.dim - 1):
        x = random_cochain(lat, k, rng)
        assert np.max(np.abs(d(lat, d(lat, x)).values)) < 1e-12


@pytest.mark.parametrize("lattice", ["lat3", "lat4"])
def test_d_star_is_adjoint(lattice, request, rng):
    lat = request.getfixturevalue(lattice)
    for k in range(lat.dim):
        x = random_cochain(lat, k, rng)
        y = random_cochain(lat, k + 1, rng)
        lhs = inner(lat, d(lat, x).values, y.values)
        rhs = inner(lat, x.values, d_star(lat, y).values)
        assert abs(lhs - rhs) < 1e-12 * norm(lat, x.values) * norm(lat, y.values) * 10


@pytest.mark.parametrize("lattice", ["lat3", "lat4"])
def test_hodge_star_sign_law(lattice, request, rng):
    lat = request.getfixturevalue(lattice)
    for k in range(lat.dim + 1):
        x = random_cochain(lat, k, rng)
        twice = hodge_star(lat, hodge_star(lat, x))
        assert twice.degree == k
        assert np.array_equal(twice.values, (-1) ** (k * (lat.dim - k)) * x.values)


def test_hodge_star_on_two_forms(lat4):
    x = lat4.zeros(2)
    x[1] = 1.0
    star = hodge_star(lat4, Cochain(2, x)).values
    assert np.all(star[4] == -1.0)
    assert np.count_nonzero(star) == lat4.n_sites


def test_selfdual_projection_is_idempotent(lat4, lat3, rng):
    x = random_cochain(lat4, 2, rng)
    once = selfdual_project(lat4, x)
    assert np.allclose(selfdual_project(lat4, once).values, once.values)
    assert np.allclose(hodge_star(lat4, once).values, once.values)
    with pytest.raises(LatticeError):
        selfdual_project(lat3, random_cochain(lat3, 2, rng))
    with pytest.raises(LatticeError):
        selfdual_project(lat4, random_cochain(lat4, 1, rng))


def test_degree_errors(lat3, rng):
    with pytest.raises(LatticeError):
        d(lat3, random_cochain(lat3, 3, rng))
    with pytest.raises(LatticeError):
        d_star(lat3, random_cochain(lat3, 0, rng))
    with pytest.raises(LatticeError):
        d(lat3, Cochain(1, np.zeros((2,) + lat3.sizes)))
    with pytest.raises(LatticeError):
        inner(lat3, np.zeros(3), np.zeros(4))


def test_flux_background_plaquettes(lat4, flux):
    m = flux(4, p01=2, p13=-4, p23=6)
    bg = flux_background(lat4, m)
    assert bg.spinor_compatible
    for p, (u, v) in enumerate(lat4.faces(2)):
        area = lat4.spacings[u] * lat4.spacings[v]
        assert np.allclose(bg.f0[p], 2 * np.pi * m[u, v] / (lat4.lengths[u] * lat4.lengths[v]))
        holonomy = coboundary(lat4, bg.a0, 1)[p] * area + 2 * np.pi * bg.dirac_string[p]
        assert np.max(np.abs(holonomy - bg.f0[p] * area)) < 1e-12
    assert np.allclose(plaquette_flux(lat4, bg.f0), 2 * np.pi * m)


def test_flux_is_quantized_under_perturbation(lat4, flux, rng):
    m = flux(4, p02=3, p12=-1)
    bg = flux_background(lat4, m)
    a = rng.normal(size=(4,) + lat4.sizes)
    total = plaquette_flux(lat4, bg.f0 + coboundary(lat4, a, 1))
    assert np.allclose(total, 2 * np.pi * m, atol=1e-10)
    assert not bg.spinor_compatible


def test_chern_numbers_are_half_the_flux(lat4, flux):
    m = flux(4, p01=2, p23=-2)
    numbers = chern_numbers(lat4, flux_background(lat4, m).f0)
    assert np.allclose(numbers["c1_det"], m)
    assert np.allclose(numbers["c1"], m / 2)


def test_trivial_background(lat3):
    bg = flux_background(lat3)
    assert bg.is_trivial and bg.spinor_compatible
    assert not np.any(bg.phases)


@pytest.mark.parametrize(
    "m",
    [
        np.zeros((3, 3)),
        np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
        np.array([[0, 0.5, 0, 0], [-0.5, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
        np.array([[0, 40, 0, 0], [-40, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
    ],
)
def test_invalid_flux_is_rejected(lat4, m):
    with pytest.raises(FluxError):
        flux_background(lat4, m)
