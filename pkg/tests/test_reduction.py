from __future__ import annotations

import numpy as np
import pytest

from src.errors import LatticeError, TemporalGaugeError
from src.fields import Config, GaugeMap, Tangent, gauge_act, random_config, random_gauge_map
from src.lattice import TorusLattice, flux_background
from src.reduction import (
    CupVariant,
    _cup_1_2_adjoint,
    _cup_2_1_adjoint,
    chern_simons_gradient,
    csd,
    csd_descent,
    csd_gradient,
    cup_1_2,
    cup_2_1,
    flow_rhs,
    gauge_shift_predicted,
    slice_norms,
    temporal_slice,
)


def unit_direction(c: Config, rng: np.random.Generator) -> Tangent:
    t = Tangent(
        rng.normal(size=c.a.shape),
        rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape),
    )
    return t * (1.0 / t.rms())


def test_cup_products_against_their_adjoints(rng):
    g = rng.normal(size=(3, 4, 5, 6))
    b = rng.normal(size=(3, 4, 5, 6))
    assert np.sum(cup_1_2(b, g)) == pytest.approx(np.sum(b * _cup_1_2_adjoint(g)))
    assert np.sum(cup_2_1(g, b)) == pytest.approx(np.sum(b * _cup_2_1_adjoint(g)))


@pytest.mark.parametrize("variant", list(CupVariant))
def test_chern_simons_gradient_matches_differences(config3, rng, variant):
    eps = 1e-5
    g = chern_simons_gradient(config3, variant=variant)
    for _ in range(3):
        alpha = rng.normal(size=config3.a.shape)
        plus = csd(config3.with_fields(a=config3.a + eps * alpha), variant=variant).chern_simons
        minus = csd(config3.with_fields(a=config3.a - eps * alpha), variant=variant).chern_simons
        fd = (plus - minus) / (2 * eps)
        assert fd == pytest.approx(config3.lat.cell_volume * np.sum(g * alpha), rel=1e-6)


def test_flow_rhs_is_minus_the_gradient(config3, rng):
    rhs = flow_rhs(config3)
    eps = 1e-5
    for _ in range(5):
        v = unit_direction(config3, rng)
        fd = (csd(config3.step(v, eps)).value - csd(config3.step(v, -eps)).value) / (2 * eps)
        assert fd == pytest.approx(-rhs.dot(config3.lat, v), rel=1e-6)


def test_gradient_with_reference_connection(config3, rng):
    reference = rng.normal(size=config3.a.shape)
    g = csd_gradient(config3, reference)
    v = unit_direction(config3, rng)
    eps = 1e-5
    fd = (csd(config3.step(v, eps), reference).value - csd(config3.step(v, -eps), reference).value) / (2 * eps)
    assert fd == pytest.approx(g.dot(config3.lat, v), rel=1e-6)


def test_dirac_term_is_real(config3):
    value = csd(config3)
    assert abs(value.dirac_imag) <= 1e-10 * max(abs(value.dirac), 1.0)
    assert value.value == pytest.approx(value.chern_simons + value.dirac)


def test_csd_needs_three_dimensions(config4):
    with pytest.raises(LatticeError):
        csd(config4)
    with pytest.raises(LatticeError):
        flow_rhs(config4)


@pytest.mark.parametrize(
    "planes,winding",
    [((2, 0, 0), (0, 0, 1)), ((0, -2, 0), (0, 1, 0)), ((0, 0, 2), (1, 0, 0)), ((1, 2, -1), (2, -1, 1))],
)
def test_gauge_shift_of_csd(flux, planes, winding):
    lat = TorusLattice.cubic(3, 4)
    m = flux(3, p01=planes[0], p02=planes[1], p12=planes[2])
    base = random_config(lat, flux_background(lat, m), seed=1, psi_amplitude=0.0)
    g = GaugeMap(f=random_gauge_map(lat, seed=2).f, winding=winding)
    shift = csd(gauge_act(g, base)).value - csd(base).value
    assert shift == pytest.approx(gauge_shift_predicted(m, winding), abs=1e-8)


def test_small_gauge_maps_leave_csd_unchanged(config3):
    g = random_gauge_map(config3.lat, seed=5, max_winding=0)
    assert csd(gauge_act(g, config3)).value == pytest.approx(csd(config3).value, abs=1e-9)


def test_csd_descent_is_monotone(config3):
    run = csd_descent(config3, steps=15)
    assert len(run.values) == 16
    assert len(run.rhs_norms) == len(run.psi_sup) == 16
    assert np.all(np.diff(run.values) <= 0)
    assert run.values[-1] < run.values[0]


@pytest.fixture
def temporal4(lat4, flux):
    c = random_config(lat4, flux_background(lat4, flux(4, p12=2, p23=-2)), seed=3)
    return c.with_fields(a=np.concatenate([np.zeros((1,) + lat4.sizes), c.a[1:]]))


def test_temporal_slices_satisfy_the_flow_identity(temporal4):
    slicing = temporal_slice(temporal4)
    assert len(slicing.slices) == temporal4.lat.sizes[0]
    assert slicing.slices[0].lat.sizes == temporal4.lat.sizes[1:]
    assert slicing.identity_error() < 1e-10
    assert len(slice_norms(slicing)) == temporal4.lat.sizes[0]


def test_temporal_gauge_is_required(config4, lat4, flux):
    with pytest.raises(TemporalGaugeError) as info:
        temporal_slice(config4)
    assert info.value.violation > 0
    time_flux = Config.zero(lat4, flux_background(lat4, flux(4, p01=2)))
    with pytest.raises(TemporalGaugeError):
        temporal_slice(time_flux)
    with pytest.raises(LatticeError):
        temporal_slice(Config.zero(TorusLattice.cubic(3, 4)))
