"""Covariant derivative, Dirac operators, curvature and the monopole residual.

Conventions: nabla = d - (i/2) A, discretized with the link variables
U_u(x) = exp(-i phi_u(x) / 2), phi_u = h_u (A0 + a)_u, and the central
difference nabla_u psi(x) = (U_u(x) psi(x+u) - U_u(x-u)^* psi(x-u)) / (2 h_u).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.clifford import (
    GammaRep,
    build_gamma_rep,
    quadratic_form,
    quadratic_form_derivative,
    two_form_action,
)
from src.errors import FluxError, LatticeError
from src.fields import Config, Tangent, gauge_tangent
from src.lattice import coboundary, inner, norm, selfdual_values

logger = logging.getLogger(__name__)

SELFDUAL_TOL = 1e-12


def gamma_rep(c: Config) -> GammaRep:
    return build_gamma_rep(c.lat.dim)


def link_transports(c: Config) -> np.ndarray:
    """U_u(x) for every direction, shape (d, *sizes)."""
    phases = c.bg.phases + np.stack([h * a for h, a in zip(c.lat.spacings, c.a)])
    return np.exp(-0.5j * phases)


def _require_spinor_bundle(c: Config, field: np.ndarray) -> bool:
    """True when ``field`` is identically zero (every derivative vanishes)."""
    if np.any(field):
        if not c.bg.spinor_compatible:
            raise FluxError(
                f"flux {c.bg.m.tolist()} has odd entries: no spinor bundle, psi must vanish"
            )
        return False
    return True


def shift_forward(field: np.ndarray, u: int) -> np.ndarray:
    """field(x + e_u) for arrays with one leading component axis."""
    return np.roll(field, -1, axis=1 + u)


def shift_backward(field: np.ndarray, u: int) -> np.ndarray:
    return np.roll(field, 1, axis=1 + u)


def covariant_derivative(c: Config, field: np.ndarray | None = None) -> np.ndarray:
    """Central covariant differences of ``field`` (default ``c.psi``).

    Returns shape (d, components, *sizes).
    """
    field = c.psi if field is None else field
    out = np.zeros((c.lat.dim,) + field.shape, dtype=complex)
    if _require_spinor_bundle(c, field):
        return out
    transports = link_transports(c)
    for u, h in enumerate(c.lat.spacings):
        ahead = transports[u] * shift_forward(field, u)
        behind = shift_backward(np.conj(transports[u]) * field, u)
        out[u] = (ahead - behind) / (2 * h)
    return out


def connection_laplacian(c: Config, field: np.ndarray | None = None) -> np.ndarray:
    """nabla^* nabla = -sum_u nabla_u nabla_u."""
    field = c.psi if field is None else field
    grads = covariant_derivative(c, field)
    out = np.zeros_like(field, dtype=complex)
    for u in range(c.lat.dim):
        out -= _directional(c, grads[u], u)
    return out


def _directional(c: Config, field: np.ndarray, u: int) -> np.ndarray:
    if not np.any(field):
        return np.zeros_like(field, dtype=complex)
    transport = link_transports(c)[u]
    h = c.lat.spacings[u]
    ahead = transport * shift_forward(field, u)
    behind = shift_backward(np.conj(transport) * field, u)
    return (ahead - behind) / (2 * h)


def dirac(c: Config, psi: np.ndarray | None = None) -> np.ndarray:
    """D+ psi as a section of S- (d=4), or the 3-d Dirac operator (d=3)."""
    rep = gamma_rep(c)
    grads = covariant_derivative(c, psi)
    return np.einsum("uab,ub...->a...", rep.dirac_plus_blocks, grads)


def dirac_minus(c: Config, chi: np.ndarray) -> np.ndarray:
    """D- : sections of S- back to S+ (the formal adjoint of D+)."""
    rep = gamma_rep(c)
    grads = covariant_derivative(c, chi)
    return np.einsum("uab,ub...->a...", rep.dirac_minus_blocks, grads)


def dirac_full(c: Config, spinor: np.ndarray) -> np.ndarray:
    """Full Dirac operator on a 4-component spinor field (d=4)."""
    rep = gamma_rep(c)
    if rep.dim != 4 or spinor.shape[0] != 4:
        raise LatticeError("dirac_full acts on 4-component spinors on a 4-d lattice")
    grads = covariant_derivative(c, spinor)
    return np.einsum("uab,ub...->a...", rep.generators, grads)


def curvature(c: Config) -> np.ndarray:
    """F = F0 + da as a 2-cochain."""
    return c.bg.f0 + coboundary(c.lat, c.a, 1)


def sd_curvature(c: Config) -> np.ndarray:
    return selfdual_values(c.lat, curvature(c))


def clover_curvature(c: Config) -> np.ndarray:
    """Average of F over the four plaquettes of each plane touching x."""
    f = curvature(c)
    out = np.empty_like(f)
    for p, (u, v) in enumerate(c.lat.faces(2)):
        fp = f[p]
        fu = np.roll(fp, 1, axis=u)
        fv = np.roll(fp, 1, axis=v)
        fuv = np.roll(fu, 1, axis=v)
        out[p] = 0.25 * (fp + fu + fv + fuv)
    return out


def check_selfdual(c: Config, eta: np.ndarray | None) -> np.ndarray | None:
    if eta is None:
        return None
    if eta.shape != c.bg.f0.shape:
        raise LatticeError(f"eta has shape {eta.shape}, expected {c.bg.f0.shape}")
    defect = norm(c.lat, eta - selfdual_values(c.lat, eta))
    if defect > SELFDUAL_TOL * max(norm(c.lat, eta), 1.0):
        raise ValueError(f"eta is not self-dual (defect {defect:.2e})")
    return eta


@dataclass(frozen=True)
class SWResidual:
    """(D+ psi, F+ + eta - q(psi))."""

    dirac: np.ndarray
    curv: np.ndarray
    dirac_norm: float
    curv_norm: float

    @property
    def total(self) -> float:
        return float(np.hypot(self.dirac_norm, self.curv_norm))


def sw_residual(c: Config, eta: np.ndarray | None = None) -> SWResidual:
    if c.lat.dim != 4:
        raise LatticeError("the monopole equations live on a 4-d lattice")
    eta = check_selfdual(c, eta)
    rep = gamma_rep(c)
    dirac_part = dirac(c)
    curv = sd_curvature(c) - quadratic_form(rep, c.psi)
    if eta is not None:
        curv = curv + eta
    return SWResidual(
        dirac=dirac_part,
        curv=curv,
        dirac_norm=norm(c.lat, dirac_part),
        curv_norm=norm(c.lat, curv),
    )


@dataclass(frozen=True)
class WeitzenbockResult:
    defect: float
    psi_norm: float

    @property
    def psi_vanishes(self) -> bool:
        return self.psi_norm == 0.0

    @property
    def relative(self) -> float:
        """defect / ||psi||, or the absolute defect when psi = 0."""
        return self.defect if self.psi_vanishes else self.defect / self.psi_norm


def weitzenbock_residual(c: Config) -> WeitzenbockResult:
    """|| D-D+ psi - nabla^*nabla psi + (i/2) rho(F) psi || with the clover F.

    Exact for flat backgrounds; O(h^2) otherwise.
    """
    rep = gamma_rep(c)
    lhs = dirac_minus(c, dirac(c))
    rough = connection_laplacian(c)
    curv_term = 0.5j * two_form_action(rep, clover_curvature(c), c.psi)
    defect = lhs - rough + curv_term
    return WeitzenbockResult(defect=norm(c.lat, defect), psi_norm=norm(c.lat, c.psi))


def transport_variation(c: Config, alpha: np.ndarray, field: np.ndarray | None = None) -> np.ndarray:
    """First variation of nabla_u field under a -> a + alpha, shape (d, comps, *sizes)."""
    field = c.psi if field is None else field
    out = np.zeros((c.lat.dim,) + field.shape, dtype=complex)
    if not np.any(field):
        return out
    transports = link_transports(c)
    for u in range(c.lat.dim):
        ahead = alpha[u] * transports[u] * shift_forward(field, u)
        behind = shift_backward(alpha[u] * np.conj(transports[u]) * field, u)
        out[u] = -0.25j * (ahead + behind)
    return out


@dataclass(frozen=True)
class LinearizedOp:
    """Derivative of ``sw_residual`` at a configuration."""

    c: Config

    def apply(self, t: Tangent) -> tuple[np.ndarray, np.ndarray]:
        c = self.c
        rep = gamma_rep(c)
        dirac_part = dirac(c, t.phi) + np.einsum(
            "uab,ub...->a...", rep.dirac_plus_blocks, transport_variation(c, t.alpha)
        )
        curv_part = selfdual_values(c.lat, coboundary(c.lat, t.alpha, 1))
        curv_part = curv_part - quadratic_form_derivative(rep, c.psi, t.phi)
        return dirac_part, curv_part

    def apply_gauge(self, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """T applied to the infinitesimal gauge direction; equals (i f D+psi, 0)."""
        return self.apply(gauge_tangent(self.c, f))


def linearize(c: Config) -> LinearizedOp:
    if c.lat.dim != 4:
        raise LatticeError("linearization is defined on 4-d configurations")
    return LinearizedOp(c)


def residual_inner(c: Config, x: tuple[np.ndarray, np.ndarray], y: tuple[np.ndarray, np.ndarray]) -> float:
    return inner(c.lat, x[0], y[0]) + inner(c.lat, x[1], y[1])
