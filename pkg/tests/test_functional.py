from __future__ import annotations

import numpy as np
import pytest

from src.fields import Config, Tangent, gauge_act, random_config, random_gauge_map
from src.functional import (
    FlowOptions,
    FunctionalForm,
    FunctionalParams,
    action,
    action_terms,
    bounds_report,
    constant_eta,
    flow_minimize,
    gradient,
    solve_report,
)
from src.lattice import TorusLattice, flux_background, hodge_values, norm
from src.operators import sd_curvature


def random_direction(c: Config, rng: np.random.Generator) -> Tangent:
    t = Tangent(
        rng.normal(size=c.a.shape),
        rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape),
    )
    return t * (1.0 / t.rms())


def test_raw_form_has_no_kappa_and_no_gradient(config4):
    with pytest.raises(ValueError):
        FunctionalParams(kappa=1.0, form="raw")
    with pytest.raises(ValueError):
        gradient(config4, FunctionalParams(form=FunctionalForm.RAW))


def test_terms_sum_to_action(config4):
    p = FunctionalParams(kappa=-0.7, eta=constant_eta(config4.lat, 0.4))
    terms = action_terms(config4, p)
    assert set(terms) == {"kinetic", "curvature", "potential", "perturbation"}
    assert action(config4, p) == pytest.approx(sum(terms.values()))


def test_raw_and_weitzenbock_forms_agree_on_flat_connections(lat4):
    c = random_config(lat4, flux_background(lat4), seed=2)
    c = c.with_fields(a=random_gauge_map(lat4, seed=3, max_winding=1).connection_shift(lat4))
    raw = action(c, FunctionalParams(form=FunctionalForm.RAW))
    assert raw == pytest.approx(action(c, FunctionalParams()), rel=1e-10)


@pytest.mark.parametrize("kappa,amplitude", [(0.0, 0.0), (-1.0, 0.3), (2.0, 0.0)])
def test_gradient_matches_directional_derivative(config4, rng, kappa, amplitude):
    p = FunctionalParams(kappa=kappa, eta=constant_eta(config4.lat, amplitude))
    g = gradient(config4, p)
    eps = 1e-5
    for _ in range(3):
        v = random_direction(config4, rng)
        fd = (action(config4.step(v, eps), p) - action(config4.step(v, -eps), p)) / (2 * eps)
        assert fd == pytest.approx(g.dot(config4.lat, v), rel=1e-6)


def test_action_is_gauge_invariant(config4):
    p = FunctionalParams(kappa=-1.0, eta=constant_eta(config4.lat, 0.3))
    moved = gauge_act(random_gauge_map(config4.lat, seed=12, max_winding=2), config4)
    assert action(moved, p) == pytest.approx(action(config4, p), rel=1e-11)


def test_constant_eta(lat4):
    assert constant_eta(lat4, 0.0) is None
    eta = constant_eta(lat4, 0.5)
    assert np.allclose(hodge_values(lat4, eta, 2), eta)
    assert np.allclose(eta[0], 0.5 / np.sqrt(2.0))
    assert np.allclose(eta[5], 0.5 / np.sqrt(2.0))


def test_zero_configuration_is_already_critical(lat4):
    result = flow_minimize(Config.zero(lat4), FunctionalParams(kappa=1.0), FlowOptions(max_iters=10))
    assert result.converged
    assert result.iterations == 0
    assert result.action == 0.0
    assert len(result.trace) == 1


def test_flow_decreases_the_action(config4):
    p = FunctionalParams(kappa=-1.0)
    rows = []
    result = flow_minimize(config4, p, FlowOptions(max_iters=40, gauge_fix_period=10, callback=rows.append))
    actions = np.array([r.action for r in result.trace])
    assert rows == result.trace
    assert result.iterations == 40
    assert result.gauge_fixes == 4
    assert np.all(np.diff(actions) <= 1e-10 * abs(actions[0]))
    assert result.action < actions[0]


def test_bounds_report_flags_large_spinors(lat4):
    c = Config.zero(lat4).with_fields(psi=2.0 * np.ones((2,) + lat4.sizes, dtype=complex))
    report = bounds_report(c, FunctionalParams(kappa=-1.0))
    assert report.psi_sup2 == pytest.approx(8.0)
    assert report.psi_bound == 1.0
    assert report.i_plus == 0.0
    assert report.i_plus_bound == pytest.approx(lat4.volume / 8)
    assert len(report.violations) == 1


def test_solve_report_summarizes_a_run(config4):
    p = FunctionalParams(kappa=0.5)
    result = flow_minimize(config4, p, FlowOptions(max_iters=5))
    report = solve_report(result, p, seed=7)
    assert report.seed == 7 and not report.converged
    assert report.iterations == 5
    assert "iteration cap" in report.message
    assert {"kinetic", "curvature", "potential", "dirac_squared", "curvature_equation_squared"} <= set(report.energy)
    assert np.allclose(report.chern, [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_positive_kappa_flows_to_the_reducible_solution(seed):
    lat = TorusLattice.cubic(4, 8)
    p = FunctionalParams(kappa=1.0)
    c0 = random_config(lat, flux_background(lat), seed=seed)
    result = flow_minimize(c0, p, FlowOptions(tol=1e-8, max_iters=5000))
    assert result.converged
    assert np.sqrt(bounds_report(result.config, p).psi_sup2) < 1e-6
    assert norm(lat, sd_curvature(result.config)) < 1e-6
