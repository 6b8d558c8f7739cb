from __future__ import annotations

import numpy as np
import pytest

from src.errors import FluxError, LatticeError
from src.fields import Config, GaugeMap, flux_section, gauge_act, random_config, random_gauge_map
from src.lattice import TorusLattice, flux_background, inner, norm, selfdual_values
from src.operators import (
    check_selfdual,
    clover_curvature,
    connection_laplacian,
    covariant_derivative,
    dirac,
    dirac_full,
    dirac_minus,
    linearize,
    residual_inner,
    sw_residual,
    weitzenbock_residual,
)
from src.suites import convergence_order, weitzenbock_refinement


def test_plane_wave_on_trivial_background(lat3):
    c = Config.zero(lat3)
    k = (1, 2, 0)
    wave = np.exp(2j * np.pi * sum(k[u] * lat3.index_grid(u) / lat3.sizes[u] for u in range(3)))
    field = np.stack([wave, 2 * wave])
    grads = covariant_derivative(c, field)
    for u in range(3):
        expected = 1j * np.sin(2 * np.pi * k[u] / lat3.sizes[u]) / lat3.spacings[u]
        assert np.allclose(grads[u], expected * field, atol=1e-12)


def test_zero_field_has_zero_derivative_even_on_odd_flux(lat4, flux):
    c = Config.zero(lat4, flux_background(lat4, flux(4, p01=1)))
    assert not np.any(covariant_derivative(c))
    assert not np.any(dirac(c))


def test_nonzero_spinor_on_odd_flux_is_rejected(lat4, flux):
    c = Config.zero(lat4, flux_background(lat4, flux(4, p01=1)))
    c = c.with_fields(psi=np.ones_like(c.psi))
    with pytest.raises(FluxError):
        covariant_derivative(c)


def test_dirac_is_gauge_covariant(config4):
    g = random_gauge_map(config4.lat, seed=4, max_winding=2)
    moved = gauge_act(g, config4)
    phase = np.exp(1j * g.angle(config4.lat))
    assert np.allclose(dirac(moved), phase * dirac(config4), atol=1e-12)


@pytest.mark.parametrize("config", ["config3", "config4"])
def test_dirac_minus_is_adjoint(config, request, rng):
    c = request.getfixturevalue(config)
    chi = rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape)
    lhs, rhs = inner(c.lat, dirac(c), chi), inner(c.lat, c.psi, dirac_minus(c, chi))
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_connection_laplacian_is_the_kinetic_energy(config4):
    energy = inner(config4.lat, connection_laplacian(config4), config4.psi)
    assert energy == pytest.approx(norm(config4.lat, covariant_derivative(config4)) ** 2, rel=1e-12)


def test_dirac_full_is_block_off_diagonal(config4):
    full = np.concatenate([config4.psi, np.zeros_like(config4.psi)])
    out = dirac_full(config4, full)
    assert not np.any(out[:2])
    assert np.allclose(out[2:], dirac(config4))
    with pytest.raises(LatticeError):
        dirac_full(config4, config4.psi)


def test_clover_curvature_of_constant_background(lat4, flux):
    bg = flux_background(lat4, flux(4, p02=2, p13=-2))
    c = Config.zero(lat4, bg)
    assert np.allclose(clover_curvature(c), bg.f0, atol=1e-14)


def test_weitzenbock_is_exact_when_flat(lat4):
    c = random_config(lat4, flux_background(lat4), seed=3)
    c = c.with_fields(a=random_gauge_map(lat4, seed=8, max_winding=2).connection_shift(lat4))
    assert weitzenbock_residual(c).relative < 1e-12


def test_weitzenbock_without_a_spinor_reports_the_absolute_defect(lat4, flux):
    c = Config.zero(lat4, flux_background(lat4, flux(4, p01=2)))
    result = weitzenbock_residual(c)
    assert result.psi_vanishes
    assert result.relative == result.defect == 0.0


def test_flux_section_is_smooth_across_the_seam(flux):
    """Sup of the covariant derivative settles under refinement; a periodic field would double."""
    sups = []
    for n in (16, 32):
        lat = TorusLattice.cubic(3, n, 8.0 / n)
        bg = flux_background(lat, flux(3, p01=2))
        c = random_config(lat, bg, seed=5, amplitude=0.0, psi_amplitude=1.0, section=True)
        sups.append(float(np.max(np.abs(covariant_derivative(c)))))
    assert sups[1] == pytest.approx(sups[0], rel=0.2)


def test_flux_section_needs_even_flux(lat3, flux):
    with pytest.raises(FluxError):
        flux_section(lat3, flux_background(lat3, flux(3, p02=1)))


@pytest.mark.slow
def test_weitzenbock_defect_is_second_order():
    rows = weitzenbock_refinement(3, (8, 16, 32), 8.0, seed=0)
    assert rows[2][1] < rows[1][1] < rows[0][1]
    assert convergence_order(rows) >= 1.9


def test_eta_must_be_self_dual(config4):
    eta = config4.lat.zeros(2)
    eta[0] = 1.0
    with pytest.raises(ValueError):
        check_selfdual(config4, eta)
    assert check_selfdual(config4, selfdual_values(config4.lat, eta)) is not None
    with pytest.raises(LatticeError):
        check_selfdual(config4, np.zeros((3,) + config4.lat.sizes))


def test_residual_lives_in_four_dimensions(config3):
    with pytest.raises(LatticeError):
        sw_residual(config3)
    with pytest.raises(LatticeError):
        linearize(config3)


def test_residual_vanishes_on_the_zero_configuration(lat4):
    r = sw_residual(Config.zero(lat4))
    assert r.total == 0.0


def test_residual_is_gauge_invariant(config4):
    r0 = sw_residual(config4)
    r1 = sw_residual(gauge_act(random_gauge_map(config4.lat, seed=1, max_winding=1), config4))
    assert r1.dirac_norm == pytest.approx(r0.dirac_norm, rel=1e-11)
    assert r1.curv_norm == pytest.approx(r0.curv_norm, rel=1e-11)


def test_linearization_matches_finite_differences(config4):
    op = linearize(config4)
    t = random_config(config4.lat, config4.bg, seed=21).difference(Config.zero(config4.lat, config4.bg))
    eps = 1e-6
    plus, minus = sw_residual(config4.step(t, eps)), sw_residual(config4.step(t, -eps))
    fd = ((plus.dirac - minus.dirac) / (2 * eps), (plus.curv - minus.curv) / (2 * eps))
    exact = op.apply(t)
    gap = (fd[0] - exact[0], fd[1] - exact[1])
    assert residual_inner(config4, gap, gap) <= 1e-12 * residual_inner(config4, exact, exact)


def test_linearization_maps_gauge_directions_to_phase_rotation(config4, rng):
    f = rng.normal(size=config4.lat.sizes)
    dirac_part, curv_part = linearize(config4).apply_gauge(f)
    expected = 1j * f * dirac(config4)
    assert np.allclose(dirac_part, expected, atol=1e-12)
    assert np.max(np.abs(curv_part)) < 1e-12


def test_large_gauge_map_on_refined_lattice_still_covariant():
    lat = TorusLattice.cubic(4, 4, 0.5)
    c = random_config(lat, flux_background(lat), seed=2)
    g = GaugeMap(f=np.zeros(lat.sizes), winding=(2, -1, 0, 1))
    moved = gauge_act(g, c)
    assert np.allclose(np.abs(dirac(moved)), np.abs(dirac(c)), atol=1e-12)
