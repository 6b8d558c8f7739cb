"""Configurations (connection offset + spinor), tangent vectors and gauge maps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from itertools import product

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from src.config import settings
from src.errors import FluxError, GaugeFixError, LatticeError
from src.lattice import (
    FluxBackground,
    TorusLattice,
    coboundary,
    coboundary_adjoint,
    flux_background,
    inner,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tangent:
    """Tangent vector (alpha, phi) at a configuration."""

    alpha: np.ndarray
    phi: np.ndarray

    def __add__(self, other: Tangent) -> Tangent:
        return Tangent(self.alpha + other.alpha, self.phi + other.phi)

    def __sub__(self, other: Tangent) -> Tangent:
        return Tangent(self.alpha - other.alpha, self.phi - other.phi)

    def __mul__(self, s: float) -> Tangent:
        return Tangent(s * self.alpha, s * self.phi)

    __rmul__ = __mul__

    def __neg__(self) -> Tangent:
        return Tangent(-self.alpha, -self.phi)

    def dot(self, lat: TorusLattice, other: Tangent) -> float:
        return inner(lat, self.alpha, other.alpha) + inner(lat, self.phi, other.phi)

    def norm(self, lat: TorusLattice) -> float:
        return float(np.sqrt(max(self.dot(lat, self), 0.0)))

    @property
    def n_dof(self) -> int:
        return self.alpha.size + 2 * self.phi.size

    def rms(self) -> float:
        """Root mean square over real degrees of freedom, no volume weight."""
        total = float(np.sum(self.alpha**2) + np.sum(np.abs(self.phi) ** 2))
        return float(np.sqrt(total / self.n_dof))


@dataclass(frozen=True)
class Config:
    """A point (A0 + a, psi) of the configuration space on ``lat``."""

    lat: TorusLattice
    bg: FluxBackground
    a: np.ndarray
    psi: np.ndarray

    def __post_init__(self) -> None:
        dim = self.lat.dim
        if self.a.shape != (dim,) + self.lat.sizes:
            raise LatticeError(f"connection offset has shape {self.a.shape}")
        if self.psi.shape != (2,) + self.lat.sizes:
            raise LatticeError(f"spinor has shape {self.psi.shape}")
        if self.bg.m.shape != (dim, dim):
            raise LatticeError("background dimension does not match the lattice")

    @classmethod
    def zero(cls, lat: TorusLattice, bg: FluxBackground | None = None) -> Config:
        bg = bg if bg is not None else flux_background(lat)
        return cls(
            lat=lat,
            bg=bg,
            a=np.zeros((lat.dim,) + lat.sizes),
            psi=np.zeros((2,) + lat.sizes, dtype=complex),
        )

    def with_fields(self, a: np.ndarray | None = None, psi: np.ndarray | None = None) -> Config:
        return replace(
            self,
            a=self.a if a is None else a,
            psi=self.psi if psi is None else psi,
        )

    def step(self, t: Tangent, s: float) -> Config:
        return self.with_fields(a=self.a + s * t.alpha, psi=self.psi + s * t.phi)

    def difference(self, other: Config) -> Tangent:
        return Tangent(self.a - other.a, self.psi - other.psi)

    @property
    def psi_identically_zero(self) -> bool:
        return not np.any(self.psi)


@dataclass(frozen=True)
class GaugeMap:
    """u = exp(i (f + 2 pi sum_u w_u n_u / N_u)) on the lattice."""

    f: np.ndarray
    winding: tuple[int, ...]

    @classmethod
    def identity(cls, lat: TorusLattice) -> GaugeMap:
        return cls(f=np.zeros(lat.sizes), winding=(0,) * lat.dim)

    def angle(self, lat: TorusLattice) -> np.ndarray:
        total = self.f.copy()
        for u, w in enumerate(self.winding):
            if w:
                total = total + 2 * np.pi * w * lat.index_grid(u) / lat.sizes[u]
        return total

    def compose(self, other: GaugeMap) -> GaugeMap:
        return GaugeMap(
            f=self.f + other.f,
            winding=tuple(a + b for a, b in zip(self.winding, other.winding)),
        )

    def inverse(self) -> GaugeMap:
        return GaugeMap(f=-self.f, winding=tuple(-w for w in self.winding))

    def connection_shift(self, lat: TorusLattice) -> np.ndarray:
        """2 (df + 2 pi w_u / L_u): closed, with periods 4 pi w_u."""
        shift = 2.0 * coboundary(lat, self.f[np.newaxis], 0)
        for u, w in enumerate(self.winding):
            shift[u] += 4 * np.pi * w / lat.lengths[u]
        return shift


def gauge_act(g: GaugeMap, c: Config) -> Config:
    """(a, psi) -> (a + 2 (df + 2 pi w/L), u psi); the action preserves every residual."""
    if g.f.shape != c.lat.sizes or len(g.winding) != c.lat.dim:
        raise LatticeError("gauge map does not live on this lattice")
    phase = np.exp(1j * g.angle(c.lat))
    return c.with_fields(a=c.a + g.connection_shift(c.lat), psi=phase * c.psi)


def gauge_tangent(c: Config, f: np.ndarray) -> Tangent:
    """Infinitesimal gauge direction (2 df, i f psi)."""
    return Tangent(2.0 * coboundary(c.lat, f[np.newaxis], 0), 1j * f * c.psi)


def coulomb_fix(
    c: Config, tol: float | None = None, max_iters: int | None = None
) -> tuple[Config, GaugeMap]:
    """Gauge transform ``c`` so that d_star a = 0.

    Solves d_star d f = -d_star a / 2 with conjugate gradients; the returned
    gauge map has zero winding and mean-free f.
    """
    tol = settings.GAUGE_TOL if tol is None else tol
    max_iters = settings.POISSON_MAX_ITERS if max_iters is None else max_iters
    lat = c.lat
    a_norm = float(np.linalg.norm(c.a))
    if a_norm == 0.0:
        return c, GaugeMap.identity(lat)

    rhs = -0.5 * coboundary_adjoint(lat, c.a, 0)[0]
    rhs -= rhs.mean()

    def laplacian(x: np.ndarray) -> np.ndarray:
        field = x.reshape((1,) + lat.sizes)
        return coboundary_adjoint(lat, coboundary(lat, field, 0), 0).ravel()

    operator = LinearOperator((lat.n_sites, lat.n_sites), matvec=laplacian, dtype=float)
    f, info = cg(
        operator,
        rhs.ravel(),
        rtol=1e-3 * tol,
        atol=0.25 * tol * a_norm,
        maxiter=max_iters,
    )
    f = f.reshape(lat.sizes)
    f -= f.mean()
    g = GaugeMap(f=f, winding=(0,) * lat.dim)
    fixed = gauge_act(g, c)
    residual = float(np.linalg.norm(coboundary_adjoint(lat, fixed.a, 0)))
    if residual > tol * a_norm:
        raise GaugeFixError(
            f"Coulomb gauge not reached after {max_iters} CG iterations (info={info})",
            residual=residual / a_norm,
        )
    logger.debug("coulomb_fix: relative residual %.2e", residual / a_norm)
    return fixed, g


def _mode_set(dim: int, kmax: int) -> list[tuple[int, ...]]:
    return list(product(range(-kmax, kmax + 1), repeat=dim))


def _band_limited(
    lat: TorusLattice,
    coefficients: np.ndarray,
    modes: list[tuple[int, ...]],
    shift: tuple[float, ...],
) -> np.ndarray:
    """sum_k c_k exp(2 pi i k.(n + shift) / N) sampled on the lattice."""
    grid = np.zeros(lat.sizes, dtype=complex)
    for coeff, k in zip(coefficients, modes):
        index = tuple(ki % n for ki, n in zip(k, lat.sizes))
        phase = np.exp(2j * np.pi * sum(ki * s / n for ki, s, n in zip(k, shift, lat.sizes)))
        grid[index] += coeff * phase
    return np.fft.ifftn(grid) * lat.n_sites


def flux_section(lat: TorusLattice, bg: FluxBackground, width: float = 0.25, images: int = 3) -> np.ndarray:
    """Smooth section of the spinor line over the flux background, shape ``sizes``.

    For each plane (u, v) with flux m the factor is
    sum_k g(x_u - k L_u) exp(i b k L_u x_v) with b = pi m / (L_u L_v) and g a
    Gaussian of width ``width * L_u``. It picks up exactly the seam transport
    exp(i b L_u x_v) across x_u = L_u and is periodic in x_v for even m, so
    covariant differences of the sampled field see no jump at the seam.
    """
    if not bg.spinor_compatible:
        raise FluxError("odd flux: the spinor bundle does not exist")
    out = np.ones(lat.sizes, dtype=complex)
    for u, v in lat.faces(2):
        muv = int(bg.m[u, v])
        if muv == 0:
            continue
        lu, lv = lat.lengths[u], lat.lengths[v]
        xu = lat.index_grid(u) * lat.spacings[u]
        xv = lat.index_grid(v) * lat.spacings[v]
        b = np.pi * muv / (lu * lv)
        sigma = width * lu
        out = out * sum(
            np.exp(-((xu - k * lu) ** 2) / (2 * sigma**2)) * np.exp(1j * b * k * lu * xv)
            for k in range(-images, images + 1)
        )
    return out


def random_config(
    lat: TorusLattice,
    bg: FluxBackground,
    seed: int,
    amplitude: float = 0.5,
    kmax: int = 1,
    psi_amplitude: float | None = None,
    section: bool = False,
) -> Config:
    """Band-limited random configuration.

    The Fourier mode set depends only on ``kmax``, so one seed gives the same
    continuum field on every refinement of the torus. Connection components
    are sampled at link midpoints. The spinor is periodic unless ``section``
    is set, in which case it is multiplied by ``flux_section`` and is a smooth
    section of the flux bundle.
    """
    if any(n < 2 * kmax + 1 for n in lat.sizes):
        raise LatticeError(f"lattice {lat.sizes} cannot resolve modes up to {kmax}")
    psi_amplitude = amplitude if psi_amplitude is None else psi_amplitude
    if psi_amplitude and not bg.spinor_compatible:
        raise FluxError("odd flux: the spinor bundle does not exist, psi must vanish")
    rng = np.random.default_rng(seed)
    modes = _mode_set(lat.dim, kmax)
    scale = 1.0 / np.sqrt(2 * len(modes))
    a_coeffs = rng.normal(size=(lat.dim, len(modes))) + 1j * rng.normal(size=(lat.dim, len(modes)))
    p_coeffs = rng.normal(size=(2, len(modes))) + 1j * rng.normal(size=(2, len(modes)))
    a = np.stack(
        [
            _band_limited(
                lat,
                amplitude * scale * a_coeffs[u],
                modes,
                tuple(0.5 if w == u else 0.0 for w in range(lat.dim)),
            ).real
            for u in range(lat.dim)
        ]
    )
    psi = np.stack(
        [
            _band_limited(lat, psi_amplitude * scale * p_coeffs[s], modes, (0.0,) * lat.dim)
            for s in range(2)
        ]
    )
    if section and psi_amplitude:
        psi = psi * flux_section(lat, bg)
    return Config(lat=lat, bg=bg, a=a, psi=psi)


def random_gauge_map(
    lat: TorusLattice, seed: int, amplitude: float = 1.0, max_winding: int = 1, kmax: int = 1
) -> GaugeMap:
    rng = np.random.default_rng(seed)
    modes = _mode_set(lat.dim, kmax)
    coeffs = rng.normal(size=len(modes)) + 1j * rng.normal(size=len(modes))
    f = _band_limited(lat, amplitude * coeffs / np.sqrt(len(modes)), modes, (0.0,) * lat.dim).real
    winding = tuple(int(w) for w in rng.integers(-max_winding, max_winding + 1, size=lat.dim))
    return GaugeMap(f=f, winding=winding)
