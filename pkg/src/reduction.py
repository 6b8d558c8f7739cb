"""Temporal-gauge reduction to the 3-torus and the Chern-Simons-Dirac functional.

Time is the first lattice direction. A 4-d spinor slice psi4 is identified
with the 3-d spinor psi3 = sqrt2 H psi4, H the Hadamard matrix, which
conjugates the reduced Clifford generators onto the 3-d ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.clifford import build_gamma_rep, quadratic_form, spinor_current
from src.descent import DescentOptions, DescentState, SteepestDescent
from src.errors import LatticeError, TemporalGaugeError
from src.fields import Config, Tangent
from src.lattice import TorusLattice, coboundary, flux_background, hodge_values, norm
from src.operators import curvature, dirac, link_transports, shift_forward, sd_curvature

logger = logging.getLogger(__name__)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SLICE_MAP = np.sqrt(2.0) * HADAMARD
DIRAC_SLICE_MAP = np.sqrt(2.0) * HADAMARD @ (-1j * SIGMA1)


class CupVariant(str, Enum):
    ORDERED = "ordered"
    ANTISYMMETRIC = "antisymmetric"


def _require_3d(c: Config) -> None:
    if c.lat.dim != 3:
        raise LatticeError("expected a configuration on a 3-d lattice")


def _roll(f: np.ndarray, shifts: dict[int, int]) -> np.ndarray:
    for axis, s in shifts.items():
        f = np.roll(f, s, axis=axis)
    return f


def cup_1_2(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Cubical cup product of a 1-cochain with a 2-cochain (pair order 01, 02, 12)."""
    return (
        a[0] * _roll(g[2], {0: -1})
        - a[1] * _roll(g[1], {1: -1})
        + a[2] * _roll(g[0], {2: -1})
    )


def cup_2_1(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Cubical cup product of a 2-cochain with a 1-cochain."""
    return (
        g[0] * _roll(a[2], {0: -1, 1: -1})
        - g[1] * _roll(a[1], {0: -1, 2: -1})
        + g[2] * _roll(a[0], {1: -1, 2: -1})
    )


def _cup_1_2_adjoint(g: np.ndarray) -> np.ndarray:
    """L with sum cup_1_2(b, g) = sum <b, L(g)> for every 1-cochain b."""
    return np.stack([_roll(g[2], {0: -1}), -_roll(g[1], {1: -1}), _roll(g[0], {2: -1})])


def _cup_2_1_adjoint(g: np.ndarray) -> np.ndarray:
    """L with sum cup_2_1(g, b) = sum <b, L(g)> for every 1-cochain b."""
    return np.stack(
        [
            _roll(g[2], {1: 1, 2: 1}),
            -_roll(g[1], {0: 1, 2: 1}),
            _roll(g[0], {0: 1, 1: 1}),
        ]
    )


@dataclass(frozen=True)
class CSDValue:
    chern_simons: float
    dirac: float
    dirac_imag: float

    @property
    def value(self) -> float:
        return self.chern_simons + self.dirac


def csd(
    c: Config,
    reference: np.ndarray | None = None,
    variant: CupVariant = CupVariant.ORDERED,
) -> CSDValue:
    """C = 1/2 sum V (a - a_ref) cup F + 1/2 Re sum V <psi, D psi>.

    The imaginary part of the spinor term vanishes up to round-off.
    """
    _require_3d(c)
    lat = c.lat
    b = c.a if reference is None else c.a - reference
    f = curvature(c)
    if CupVariant(variant) is CupVariant.ORDERED:
        density = cup_1_2(b, f)
    else:
        density = 0.5 * (cup_1_2(b, f) + cup_2_1(f, b))
    pairing = lat.cell_volume * np.sum(c.psi * np.conj(dirac(c)))
    return CSDValue(
        chern_simons=0.5 * lat.cell_volume * float(np.sum(density)),
        dirac=0.5 * float(pairing.real),
        dirac_imag=0.5 * float(pairing.imag),
    )


def chern_simons_gradient(
    c: Config,
    reference: np.ndarray | None = None,
    variant: CupVariant = CupVariant.ORDERED,
) -> np.ndarray:
    """Exact volume-weighted gradient of the Chern-Simons term."""
    _require_3d(c)
    b = c.a if reference is None else c.a - reference
    f = curvature(c)
    db = coboundary(c.lat, b, 1)
    ordered = 0.5 * (_cup_1_2_adjoint(f) + _cup_2_1_adjoint(db))
    if CupVariant(variant) is CupVariant.ORDERED:
        return ordered
    reversed_ = 0.5 * (_cup_2_1_adjoint(f) + _cup_1_2_adjoint(db))
    return 0.5 * (ordered + reversed_)


def _spinor_connection_gradient(c: Config) -> np.ndarray:
    """d/da of 1/2 Re sum <psi, D psi>, divided by the cell volume."""
    out = np.zeros_like(c.a)
    if not np.any(c.psi):
        return out
    rep = build_gamma_rep(3)
    transports = link_transports(c)
    for k in range(3):
        ahead = np.einsum("ab,b...->a...", rep.generators[k], transports[k] * shift_forward(c.psi, k))
        behind = np.einsum("ab,b...->a...", rep.generators[k], np.conj(transports[k]) * c.psi)
        pairing = np.sum(c.psi * np.conj(ahead), axis=0) + np.sum(
            shift_forward(c.psi, k) * np.conj(behind), axis=0
        )
        out[k] = -0.125 * pairing.imag
    return out


def csd_gradient(
    c: Config,
    reference: np.ndarray | None = None,
    variant: CupVariant = CupVariant.ORDERED,
) -> Tangent:
    return Tangent(
        alpha=chern_simons_gradient(c, reference, variant) + _spinor_connection_gradient(c),
        phi=dirac(c),
    )


def flow_rhs(c: Config, reference: np.ndarray | None = None) -> Tangent:
    """Downward gradient flow of csd: (-CS gradient - v/4, -D psi).

    In the continuum the CS gradient is *F - *F0 / 2 and the spinor part of
    the connection gradient is v(psi) / 4.
    """
    return -csd_gradient(c, reference)


def reduced_rhs(c: Config) -> Tangent:
    """Temporal-gauge form of the 4-d equations: (-*F - v/4, -D psi), pointwise."""
    _require_3d(c)
    rep = build_gamma_rep(3)
    star_f = hodge_values(c.lat, curvature(c), 2)
    return Tangent(alpha=-star_f - 0.25 * spinor_current(rep, c.psi), phi=-dirac(c))


def gauge_shift_predicted(m: np.ndarray, winding: tuple[int, ...]) -> float:
    """csd(g.c) - csd(c) for a gauge map of winding w on a background of flux m."""
    w = winding
    cup = w[0] * m[1, 2] - w[1] * m[0, 2] + w[2] * m[0, 1]
    return 4 * np.pi**2 * float(cup)


@dataclass(frozen=True)
class TemporalSlicing:
    """Time slices of a 4-d configuration in temporal gauge."""

    c4: Config
    slices: list[Config]

    @property
    def time_step(self) -> float:
        return self.c4.lat.spacings[0]

    def flow_defect(self) -> list[Tangent]:
        """(d_t a + *F + v/4, nabla_t psi + D psi) on each slice."""
        n = len(self.slices)
        h = self.time_step
        defects = []
        for t, s in enumerate(self.slices):
            ahead, behind = self.slices[(t + 1) % n], self.slices[(t - 1) % n]
            rhs = reduced_rhs(s)
            da = (ahead.a - s.a) / h
            dpsi = (ahead.psi - behind.psi) / (2 * h)
            defects.append(Tangent(alpha=da - rhs.alpha, phi=dpsi - rhs.phi))
        return defects

    def identity_error(self) -> float:
        """Max gap between the 4-d residual and the slicewise flow defect.

        2 (F+ - q)_{0k} must equal the connection defect and
        sqrt2 H (-i sigma1) D+ psi4 the spinor defect.
        """
        c4 = self.c4
        rep4 = build_gamma_rep(4)
        curv = sd_curvature(c4) - quadratic_form(rep4, c4.psi)
        spinor = np.einsum("ab,b...->a...", DIRAC_SLICE_MAP, dirac(c4))
        worst = 0.0
        for t, defect in enumerate(self.flow_defect()):
            gap_a = 2.0 * curv[:3, t] - defect.alpha
            gap_psi = spinor[:, t] - defect.phi
            worst = max(worst, float(np.max(np.abs(gap_a))), float(np.max(np.abs(gap_psi))))
        return worst


def temporal_slice(c4: Config) -> TemporalSlicing:
    """Restrict a temporal-gauge 4-d configuration to its time slices."""
    if c4.lat.dim != 4:
        raise LatticeError("temporal_slice needs a 4-d configuration")
    violation = float(np.max(np.abs(c4.a[0])))
    if violation > 0.0:
        raise TemporalGaugeError("configuration is not in temporal gauge", violation)
    if np.any(c4.bg.m[0]):
        raise TemporalGaugeError("background has flux through a time plane", float(np.max(np.abs(c4.bg.m[0]))))
    lat3 = TorusLattice(sizes=c4.lat.sizes[1:], spacings=c4.lat.spacings[1:])
    bg3 = flux_background(lat3, c4.bg.m[1:, 1:])
    slices = [
        Config(
            lat=lat3,
            bg=bg3,
            a=c4.a[1:, t].copy(),
            psi=np.einsum("ab,b...->a...", SLICE_MAP, c4.psi[:, t]),
        )
        for t in range(c4.lat.sizes[0])
    ]
    return TemporalSlicing(c4=c4, slices=slices)


class CSDProblem:
    """Descent problem for csd on a 3-d configuration."""

    def __init__(self, reference: np.ndarray | None = None) -> None:
        self.reference = reference

    def objective(self, x: Config) -> float:
        return csd(x, self.reference).value

    def gradient(self, x: Config) -> Tangent:
        return csd_gradient(x, self.reference)

    def retract(self, x: Config, v: Tangent, t: float) -> Config:
        return x.step(v, t)

    def dot(self, x: Config, v: Tangent, w: Tangent) -> float:
        return v.dot(x.lat, w)

    def difference(self, x: Config, y: Config) -> Tangent:
        return x.difference(y)

    def grad_rms(self, g: Tangent) -> float:
        return g.rms()


@dataclass
class CSDRun:
    config: Config
    values: list[float]
    rhs_norms: list[float]
    psi_sup: list[float]


def csd_descent(
    c: Config, steps: int, reference: np.ndarray | None = None, initial_step: float | None = None
) -> CSDRun:
    """Fixed number of monotone descent steps on csd (it is unbounded below)."""
    _require_3d(c)
    rhs_norms: list[float] = []
    psi_sup: list[float] = []

    def record(state: DescentState[Config, Tangent]) -> None:
        rhs_norms.append(state.grad.norm(state.x.lat))
        psi_sup.append(float(np.sqrt(np.max(np.sum(np.abs(state.x.psi) ** 2, axis=0)))))

    h_min = min(c.lat.spacings)
    driver = SteepestDescent(
        CSDProblem(reference),
        DescentOptions(
            tol=0.0,
            max_iters=steps,
            initial_step=initial_step or h_min / 4,
            max_step=h_min,
        ),
        callback=record,
    )
    result = driver.minimize(c)
    logger.info("csd_descent: %d steps, C %.8e -> %.8e", steps, result.history[0], result.history[-1])
    return CSDRun(config=result.x, values=result.history, rhs_norms=rhs_norms, psi_sup=psi_sup)


def slice_norms(slicing: TemporalSlicing) -> list[tuple[float, float]]:
    """Norms of the connection and spinor flow defects per slice."""
    return [
        (norm(s.lat, d.alpha), norm(s.lat, d.phi))
        for s, d in zip(slicing.slices, slicing.flow_defect())
    ]
