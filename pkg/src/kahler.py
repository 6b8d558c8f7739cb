"""Kähler splitting of the monopole equations on the flat 4-torus.

Complex coordinates z1 = x1 + i x2, z2 = x3 + i x4 with Kähler form
omega = dx1 dx2 + dx3 dx4. S+ splits as Lambda^{0,0} (rho(omega) = -2i) plus
Lambda^{0,2} (rho(omega) = +2i); a positive spinor is written (alpha, gamma)
with gamma = i conj(beta).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.clifford import GammaRep, build_gamma_rep, two_form_action
from src.errors import LatticeError
from src.fields import Config
from src.functional import FunctionalParams, action_terms
from src.lattice import inner, norm
from src.operators import covariant_derivative, curvature, sd_curvature

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)

# Pair order (01, 02, 03, 12, 13, 23).
OMEGA = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 1.0])
OMEGA_HAT = OMEGA / SQRT2
R_HAT = np.array([0.0, 1.0, 0.0, 0.0, -1.0, 0.0]) / SQRT2
S_HAT = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 0.0]) / SQRT2

# Columns: unit generators of Lambda^{0,0} and Lambda^{0,2} inside S+.
FROZEN_PLUS_FRAME = np.eye(2, dtype=complex)
# Columns: images in S- of the unit covectors dz1bar/sqrt2 and dz2bar/sqrt2.
FROZEN_MINUS_FRAME = np.array([[0, 1j], [1j, 0]], dtype=complex)


@dataclass(frozen=True)
class KahlerStructure:
    rep: GammaRep
    plus_frame: np.ndarray
    minus_frame: np.ndarray

    @property
    def omega(self) -> np.ndarray:
        return OMEGA


def derive_frames(rep: GammaRep) -> tuple[np.ndarray, np.ndarray]:
    """Recompute the identification frames from the gamma matrices.

    The S+ frame diagonalizes i rho(omega); the S- frame is Clifford
    multiplication by dz_k bar on the Lambda^{0,0} generator, normalized.
    """
    action = 1j * two_form_action(rep, OMEGA, np.eye(2, dtype=complex))
    eigenvalues, vectors = np.linalg.eigh(action)
    order = np.argsort(-eigenvalues)
    plus = vectors[:, order]
    # fix phases so the first nonzero entry of each column is real positive
    for k in range(2):
        pivot = plus[np.argmax(np.abs(plus[:, k])), k]
        plus[:, k] *= np.conj(pivot) / abs(pivot)
    generator = plus[:, 0]
    blocks = rep.dirac_plus_blocks
    columns = []
    for u, v in ((0, 1), (2, 3)):
        image = (blocks[u] - 1j * blocks[v]) @ generator
        columns.append(image / np.linalg.norm(image))
    return plus, np.stack(columns, axis=1)


def build_kahler_structure(rep: GammaRep | None = None) -> KahlerStructure:
    rep = rep or build_gamma_rep(4)
    if rep.dim != 4:
        raise LatticeError("the Kähler splitting needs the 4-d representation")
    return KahlerStructure(rep=rep, plus_frame=FROZEN_PLUS_FRAME, minus_frame=FROZEN_MINUS_FRAME)


def split_spinor(ks: KahlerStructure, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """psi -> (alpha, beta) with |psi|^2 = |alpha|^2 + |beta|^2."""
    coords = np.einsum("ba,b...->a...", ks.plus_frame.conj(), psi)
    alpha, gamma = coords[0], coords[1]
    return alpha, 1j * np.conj(gamma)


def join_spinor(ks: KahlerStructure, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    gamma = 1j * np.conj(beta)
    return np.einsum("ab,b...->a...", ks.plus_frame, np.stack([alpha, gamma]))


def _dbar_pieces(c: Config, alpha: np.ndarray, gamma: np.ndarray) -> dict[str, np.ndarray]:
    grads_alpha = covariant_derivative(c, alpha[np.newaxis])[:, 0]
    grads_gamma = covariant_derivative(c, gamma[np.newaxis])[:, 0]
    return {
        "dbar1_alpha": 0.5 * (grads_alpha[0] + 1j * grads_alpha[1]),
        "dbar2_alpha": 0.5 * (grads_alpha[2] + 1j * grads_alpha[3]),
        "d1_gamma": 0.5 * (grads_gamma[0] - 1j * grads_gamma[1]),
        "d2_gamma": 0.5 * (grads_gamma[2] - 1j * grads_gamma[3]),
    }


def dolbeault_dirac(ks: KahlerStructure, c: Config, in_gamma_basis: bool = True) -> np.ndarray:
    """sqrt2 (dbar alpha - dbar^* gamma) in the unit (0,1) basis.

    Mapped through the S- frame it reproduces D+ psi exactly.
    """
    alpha, beta = split_spinor(ks, c.psi)
    gamma = 1j * np.conj(beta)
    parts = _dbar_pieces(c, alpha, gamma)
    unit = np.stack(
        [
            2.0 * parts["dbar1_alpha"] - 2.0 * parts["d2_gamma"],
            2.0 * parts["dbar2_alpha"] + 2.0 * parts["d1_gamma"],
        ]
    )
    if not in_gamma_basis:
        return unit
    return np.einsum("ab,b...->a...", ks.minus_frame, unit)


def type_components(g: np.ndarray) -> dict[str, np.ndarray]:
    """Components of a self-dual 2-form along omega_hat and the (2,0)/(0,2) parts."""
    def along(basis: np.ndarray) -> np.ndarray:
        return np.tensordot(basis, g, axes=(0, 0))

    g20 = (along(R_HAT) - 1j * along(S_HAT)) / SQRT2
    return {"omega": along(OMEGA_HAT), "f20": g20, "f02": np.conj(g20)}


@dataclass(frozen=True)
class KSWResidual:
    r11: float
    r20: float
    r02: float

    @property
    def total(self) -> float:
        return float(np.sqrt(self.r11**2 + self.r20**2 + self.r02**2))


def ksw_residual(ks: KahlerStructure, c: Config, eta: np.ndarray | None = None) -> KSWResidual:
    """Curvature residual split by type; total agrees with the curvature part of sw_residual."""
    lat = c.lat
    alpha, beta = split_spinor(ks, c.psi)
    g = sd_curvature(c) if eta is None else sd_curvature(c) + eta
    parts = type_components(g)
    q_omega = -(np.abs(alpha) ** 2 - np.abs(beta) ** 2) / (2 * SQRT2)
    q20 = 0.5 * alpha * beta
    return KSWResidual(
        r11=norm(lat, parts["omega"] - q_omega),
        r20=norm(lat, parts["f20"] - q20),
        r02=norm(lat, parts["f02"] - np.conj(q20)),
    )


class SignKind(str, Enum):
    ALPHA_VANISHES = "alpha_vanishes"
    BETA_VANISHES = "beta_vanishes"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SignDiagnostic:
    pairing: float
    kind: SignKind
    alpha_norm: float
    beta_norm: float


def omega_pairing(c: Config) -> float:
    """integral of omega ^ c1(L) = (1 / 4 pi) sum V (F12 + F34)."""
    f = curvature(c)
    return inner(c.lat, np.tensordot(OMEGA, f, axes=(0, 0)), np.ones(c.lat.sizes)) / (4 * np.pi)


def sign_diagnostic(ks: KahlerStructure, c: Config, tol: float = 1e-9) -> SignDiagnostic:
    """Which half of the spinor must vanish at a solution.

    A positive pairing forces alpha = 0, a negative one beta = 0.
    """
    pairing = omega_pairing(c)
    alpha, beta = split_spinor(ks, c.psi)
    if pairing > tol:
        kind = SignKind.ALPHA_VANISHES
    elif pairing < -tol:
        kind = SignKind.BETA_VANISHES
    else:
        kind = SignKind.INDETERMINATE
    return SignDiagnostic(
        pairing=pairing,
        kind=kind,
        alpha_norm=norm(c.lat, alpha),
        beta_norm=norm(c.lat, beta),
    )


def split_action(ks: KahlerStructure, c: Config, p: FunctionalParams | None = None) -> float:
    """Weitzenbock action evaluated through (alpha, beta).

    Without eta it depends on beta only through |beta| and nabla beta, so it is
    invariant under beta -> -beta.
    """
    p = p or FunctionalParams()
    alpha, beta = split_spinor(ks, c.psi)
    gamma = 1j * np.conj(beta)
    lat = c.lat
    kinetic = 0.0
    for field in (alpha, gamma):
        kinetic += norm(lat, covariant_derivative(c, field[np.newaxis])) ** 2
    density = np.abs(alpha) ** 2 + np.abs(beta) ** 2
    g = sd_curvature(c) if p.eta is None else sd_curvature(c) + p.eta
    total = kinetic + norm(lat, g) ** 2
    total += lat.cell_volume * float(np.sum(0.25 * p.kappa * density + density**2 / 8.0))
    if p.eta is not None:
        eta_parts = type_components(p.eta)
        q_omega = -(np.abs(alpha) ** 2 - np.abs(beta) ** 2) / (2 * SQRT2)
        q20 = 0.5 * alpha * beta
        # (eta, q) = eta_omega q_omega + 2 Re(eta20 conj(q20))
        total -= 2.0 * (
            inner(lat, eta_parts["omega"], q_omega) + 2.0 * inner(lat, eta_parts["f20"], q20)
        )
    return float(total)


def split_action_matches(ks: KahlerStructure, c: Config, p: FunctionalParams | None = None) -> float:
    """Relative gap between ``split_action`` and the Weitzenbock action."""
    p = p or FunctionalParams()
    reference = float(sum(action_terms(c, p).values()))
    return abs(split_action(ks, c, p) - reference) / max(abs(reference), 1.0)
