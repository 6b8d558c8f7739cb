"""The monopole energy functional, its exact gradient and the a priori bounds."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.clifford import quadratic_form, two_form_action
from src.descent import DescentOptions, DescentState, SteepestDescent
from src.fields import Config, Tangent, coulomb_fix
from src.lattice import (
    TorusLattice,
    chern_numbers,
    coboundary_adjoint,
    inner,
    norm,
    selfdual_values,
)
from src.models import BoundsReport, IterationRecord, SolveReport
from src.operators import (
    check_selfdual,
    connection_laplacian,
    covariant_derivative,
    curvature,
    dirac,
    gamma_rep,
    link_transports,
    shift_forward,
    sw_residual,
)

logger = logging.getLogger(__name__)


class FunctionalForm(str, Enum):
    RAW = "raw"
    WEITZENBOCK = "weitzenbock"


@dataclass(frozen=True)
class FunctionalParams:
    """kappa is the synthetic scalar-curvature constant, eta a self-dual perturbation."""

    kappa: float = 0.0
    eta: np.ndarray | None = None
    form: FunctionalForm = FunctionalForm.WEITZENBOCK

    def __post_init__(self) -> None:
        object.__setattr__(self, "form", FunctionalForm(self.form))
        if self.form is FunctionalForm.RAW and self.kappa != 0.0:
            raise ValueError("the raw form has no kappa term; use the weitzenbock form")


def action_terms(c: Config, p: FunctionalParams) -> dict[str, float]:
    """Per-term contributions; they sum to ``action``."""
    check_selfdual(c, p.eta)
    lat = c.lat
    rep = gamma_rep(c)
    sd = selfdual_values(lat, curvature(c))
    if p.eta is not None:
        sd = sd + p.eta
    if p.form is FunctionalForm.RAW:
        curv = sd - quadratic_form(rep, c.psi)
        return {
            "dirac": norm(lat, dirac(c)) ** 2,
            "curvature": norm(lat, curv) ** 2,
        }
    density = np.sum(np.abs(c.psi) ** 2, axis=0)
    terms = {
        "kinetic": norm(lat, covariant_derivative(c)) ** 2,
        "curvature": norm(lat, sd) ** 2,
        "potential": lat.cell_volume
        * float(np.sum(0.25 * p.kappa * density + density**2 / 8.0)),
    }
    if p.eta is not None:
        terms["perturbation"] = -2.0 * inner(lat, p.eta, quadratic_form(rep, c.psi))
    return terms


def action(c: Config, p: FunctionalParams) -> float:
    return float(sum(action_terms(c, p).values()))


def gradient(c: Config, p: FunctionalParams) -> Tangent:
    """Exact gradient of the Weitzenbock form for the volume-weighted metric."""
    if p.form is FunctionalForm.RAW:
        raise ValueError("gradients are only provided for the weitzenbock form")
    check_selfdual(c, p.eta)
    lat = c.lat
    rep = gamma_rep(c)
    psi = c.psi
    density = np.sum(np.abs(psi) ** 2, axis=0)
    grad_psi = 2.0 * connection_laplacian(c) + (0.5 * p.kappa + 0.5 * density) * psi
    if p.eta is not None:
        grad_psi = grad_psi + 1j * two_form_action(rep, p.eta, psi)

    sd = selfdual_values(lat, curvature(c))
    if p.eta is not None:
        sd = sd + p.eta
    grad_a = 2.0 * coboundary_adjoint(lat, sd, 1)
    grad_a = grad_a + _kinetic_connection_gradient(c)
    return Tangent(alpha=grad_a, phi=grad_psi)


def _kinetic_connection_gradient(c: Config) -> np.ndarray:
    """d/da_u(x) of sum_u |nabla_u psi|^2, divided by the cell volume."""
    out = np.zeros_like(c.a)
    if not np.any(c.psi):
        return out
    grads = covariant_derivative(c)
    transports = link_transports(c)
    for u in range(c.lat.dim):
        g = grads[u]
        ahead = transports[u] * shift_forward(c.psi, u)
        behind = np.conj(transports[u]) * c.psi
        pairing = np.sum(ahead * np.conj(g), axis=0) + np.sum(
            behind * np.conj(shift_forward(g, u)), axis=0
        )
        out[u] = 0.5 * pairing.imag
    return out


def bounds_report(c: Config, p: FunctionalParams) -> BoundsReport:
    """Monitor max|psi|^2 <= max(0, -kappa) and I+ <= kappa^2 Vol / 8."""
    lat = c.lat
    f = curvature(c)
    sd = selfdual_values(lat, f)
    psi_sup2 = float(np.max(np.sum(np.abs(c.psi) ** 2, axis=0)))
    i_plus = norm(lat, sd) ** 2
    i_minus = norm(lat, f - sd) ** 2
    psi_bound = max(0.0, -p.kappa)
    i_plus_bound = p.kappa**2 * lat.volume / 8.0
    violations = []
    if psi_sup2 > psi_bound * (1 + 1e-3) + 1e-8:
        violations.append(f"max|psi|^2 = {psi_sup2:.6g} exceeds {psi_bound:.6g}")
    if i_plus > i_plus_bound * (1 + 1e-3) + 1e-8 * lat.volume:
        violations.append(f"I+ = {i_plus:.6g} exceeds {i_plus_bound:.6g}")
    return BoundsReport(
        psi_sup2=psi_sup2,
        psi_bound=psi_bound,
        i_plus=i_plus,
        i_minus=i_minus,
        i_plus_bound=i_plus_bound,
        violations=violations,
    )


class MonopoleProblem:
    """Adapts the functional to the generic descent driver."""

    def __init__(self, p: FunctionalParams) -> None:
        self.p = p

    def objective(self, x: Config) -> float:
        return action(x, self.p)

    def gradient(self, x: Config) -> Tangent:
        return gradient(x, self.p)

    def retract(self, x: Config, v: Tangent, t: float) -> Config:
        return x.step(v, t)

    def dot(self, x: Config, v: Tangent, w: Tangent) -> float:
        return v.dot(x.lat, w)

    def difference(self, x: Config, y: Config) -> Tangent:
        return x.difference(y)

    def grad_rms(self, g: Tangent) -> float:
        return g.rms()


@dataclass
class FlowOptions:
    tol: float = 1e-8
    max_iters: int = 5000
    gauge_fix_period: int = 50
    bb_steps: bool = True
    callback: Callable[[IterationRecord], None] | None = None


@dataclass
class FlowResult:
    config: Config
    converged: bool
    iterations: int
    action: float
    grad_rms: float
    gauge_fixes: int
    trace: list[IterationRecord]


def iteration_record(state: DescentState[Config, Tangent]) -> IterationRecord:
    c = state.x
    f = curvature(c)
    sd = selfdual_values(c.lat, f)
    return IterationRecord(
        iter=state.iteration,
        action=state.value,
        grad_norm=state.grad_rms,
        psi_sup=float(np.sqrt(np.max(np.sum(np.abs(c.psi) ** 2, axis=0)))),
        i_plus=norm(c.lat, sd) ** 2,
        i_minus=norm(c.lat, f - sd) ** 2,
    )


def flow_minimize(c0: Config, p: FunctionalParams, opts: FlowOptions | None = None) -> FlowResult:
    """Minimize the functional from ``c0`` with Coulomb fixing every few steps.

    Raises ``SolverError`` (carrying the last iterate) on line-search failure.
    """
    opts = opts or FlowOptions()
    trace: list[IterationRecord] = []

    def record(state: DescentState[Config, Tangent]) -> None:
        row = iteration_record(state)
        trace.append(row)
        if opts.callback:
            opts.callback(row)

    h_min = min(c0.lat.spacings)
    driver = SteepestDescent(
        MonopoleProblem(p),
        DescentOptions(
            tol=opts.tol,
            max_iters=opts.max_iters,
            initial_step=h_min**2 / (4 * c0.lat.dim),
            bb_steps=opts.bb_steps,
            project_every=opts.gauge_fix_period,
        ),
        project=lambda c: coulomb_fix(c)[0],
        callback=record,
    )
    result = driver.minimize(c0)
    logger.info(
        "flow_minimize: %s after %d iterations (S=%.10g)",
        "converged" if result.converged else "stopped",
        result.iterations,
        result.value,
    )
    return FlowResult(
        config=result.x,
        converged=result.converged,
        iterations=result.iterations,
        action=result.value,
        grad_rms=result.grad_rms,
        gauge_fixes=result.projections,
        trace=trace,
    )


def constant_eta(lat: TorusLattice, amplitude: float) -> np.ndarray | None:
    """Constant self-dual perturbation amplitude (e01 + e23) / sqrt2, or None."""
    if not amplitude:
        return None
    unit = lat.zeros(2)
    unit[0] = 1.0
    return amplitude * np.sqrt(2.0) * selfdual_values(lat, unit)


def solve_report(result: FlowResult, p: FunctionalParams, seed: int) -> SolveReport:
    """Summary of one solve: residuals, the energy split, bounds and Chern numbers."""
    c = result.config
    residual = sw_residual(c, p.eta)
    energy = action_terms(c, p)
    energy["dirac_squared"] = residual.dirac_norm**2
    energy["curvature_equation_squared"] = residual.curv_norm**2
    if result.converged:
        message = f"converged after {result.iterations} iterations"
    else:
        message = f"stopped at the iteration cap ({result.iterations})"
    return SolveReport(
        seed=seed,
        converged=result.converged,
        iterations=result.iterations,
        action=result.action,
        grad_norm=result.grad_rms,
        residual_dirac=residual.dirac_norm,
        residual_curv=residual.curv_norm,
        energy=energy,
        bounds=bounds_report(c, p),
        chern=chern_numbers(c.lat, curvature(c))["c1"].tolist(),
        gauge_fixes=result.gauge_fixes,
        message=message,
    )
