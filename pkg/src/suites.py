"""Verification suites run by ``monopole-lab verify``.

Each suite returns a list of ``CheckResult``; a check passes when its measured
value is at or below its threshold. Boolean checks report 0 (pass) or 1.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from src.clifford import bivector_pairings, build_gamma_rep, quadratic_form, two_form_action
from src.config import settings
from src.errors import GaugeFixError, SolverError, TemporalGaugeError
from src.fields import (
    Config,
    GaugeMap,
    Tangent,
    coulomb_fix,
    gauge_act,
    random_config,
    random_gauge_map,
)
from src.functional import (
    FlowOptions,
    FlowResult,
    FunctionalForm,
    FunctionalParams,
    action,
    bounds_report,
    constant_eta,
    flow_minimize,
    gradient,
)
from src.kahler import (
    FROZEN_MINUS_FRAME,
    FROZEN_PLUS_FRAME,
    SignKind,
    build_kahler_structure,
    derive_frames,
    dolbeault_dirac,
    join_spinor,
    ksw_residual,
    sign_diagnostic,
    split_action,
    split_action_matches,
    split_spinor,
)
from src.lattice import (
    TorusLattice,
    coboundary,
    coboundary_adjoint,
    flux_background,
    hodge_values,
    inner,
    norm,
    plaquette_flux,
)
from src.models import BoundsReport, CheckResult, FourManifoldData, SpinCClass, SuiteReport
from src.operators import (
    dirac,
    dirac_minus,
    linearize,
    residual_inner,
    sd_curvature,
    sw_residual,
    weitzenbock_residual,
)
from src.reduction import (
    csd,
    csd_descent,
    flow_rhs,
    gauge_shift_predicted,
    temporal_slice,
)
from src.topology import (
    asd_index,
    basic_class_candidates,
    blow_up_family,
    connected_sum_invariant,
    dirac_index,
    k3_data,
    sw_dimension,
    thom_genus_bound,
)

logger = logging.getLogger(__name__)


@dataclass
class SuiteContext:
    """Knobs shared by every suite; the defaults are the acceptance settings."""

    size: int = 8
    spacing: float = 1.0
    seed: int = 0
    threads: int = 1
    sizes: tuple[int, ...] = field(default_factory=lambda: tuple(settings.WEITZENBOCK_SIZES))
    weitzenbock_dim: int = 4
    length: float = 8.0
    spinors: int = 1000
    bases: int = 5
    directions: int = 20
    gauge_maps: int = 50
    kahler_configs: int = 100
    starts: int = 10
    tol: float = field(default_factory=lambda: settings.GRAD_TOL)
    max_iters: int = field(default_factory=lambda: settings.MAX_ITERS)
    gauge_fix_period: int = field(default_factory=lambda: settings.GAUGE_FIX_PERIOD)

    def lattice(self, dim: int = 4) -> TorusLattice:
        return TorusLattice.cubic(dim, self.size, self.spacing)


def _check(name: str, value: float, threshold: float, detail: str = "") -> CheckResult:
    value = float(value)
    return CheckResult(
        name=name, passed=bool(value <= threshold), value=value, threshold=threshold, detail=detail
    )


def _flag(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(ok), value=0.0 if ok else 1.0, threshold=0.0, detail=detail)


def _relative(x: float, y: float, floor: float = 1e-300) -> float:
    return abs(x - y) / max(abs(x), abs(y), floor)


def _random_tangent(c: Config, rng: np.random.Generator) -> Tangent:
    alpha = rng.normal(size=c.a.shape)
    phi = rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape)
    t = Tangent(alpha=alpha, phi=phi)
    return t * (1.0 / t.rms())


def _flux(dim: int, **planes: int) -> np.ndarray:
    """Flux matrix from keyword planes such as ``p01=2``."""
    m = np.zeros((dim, dim), dtype=int)
    for key, value in planes.items():
        u, v = int(key[1]), int(key[2])
        m[u, v], m[v, u] = value, -value
    return m


# ---------------------------------------------------------------------------
# clifford
# ---------------------------------------------------------------------------


ASD_BASIS = np.array(
    [
        [1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, -1.0, 0.0, 0.0],
    ]
)


def clifford_suite(ctx: SuiteContext) -> list[CheckResult]:
    rng = np.random.default_rng(ctx.seed)
    checks = []
    for dim in (3, 4):
        rep = build_gamma_rep(dim)
        eye = np.eye(rep.fiber_dim)
        worst = max(
            float(np.max(np.abs(rep.bivector(i, j) + rep.bivector(j, i) + 2.0 * (i == j) * eye)))
            for i in range(dim)
            for j in range(dim)
        )
        checks.append(_check(f"anticommutator_{dim}d", worst, 0.0))

    rep = build_gamma_rep(4)
    psi = rng.normal(size=(2, ctx.spinors)) + 1j * rng.normal(size=(2, ctx.spinors))
    pairings = bivector_pairings(rep, psi)
    density = np.sum(np.abs(psi) ** 2, axis=0)
    checks.append(
        _check("pairing_real_part", np.max(np.abs(pairings.real)), 1e-13, f"{ctx.spinors} spinors")
    )
    asd = max(float(np.max(np.abs(two_form_action(rep, w, psi)))) for w in ASD_BASIS)
    checks.append(_check("asd_action", asd, 1e-13))
    identity = np.sum(np.abs(pairings) ** 2, axis=0)
    checks.append(
        _check("pairing_square_sum", np.max(np.abs(identity - 2 * density**2) / density**2), 1e-12)
    )
    q = quadratic_form(rep, psi)
    selfdual_gap = max(
        float(np.max(np.abs(q[0] - q[5]))),
        float(np.max(np.abs(q[1] + q[4]))),
        float(np.max(np.abs(q[2] - q[3]))),
    )
    checks.append(_check("quadratic_form_selfdual", selfdual_gap, 1e-13))

    rep3 = build_gamma_rep(3)
    pairings3 = bivector_pairings(rep3, psi)
    identity3 = np.sum(np.abs(pairings3) ** 2, axis=0)
    checks.append(
        _check("pairing_square_sum_3d", np.max(np.abs(identity3 - density**2) / density**2), 1e-12)
    )
    return checks


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------


def lattice_suite(ctx: SuiteContext) -> list[CheckResult]:
    rng = np.random.default_rng(ctx.seed)
    checks = []
    lattices = [
        TorusLattice(sizes=(6, 5, 4, 7), spacings=(1.0, 0.7, 1.3, 0.9)),
        TorusLattice(sizes=(5, 6, 4), spacings=(0.8, 1.1, 1.0)),
    ]
    for lat in lattices:
        tag = f"{lat.dim}d"
        dd, adjoint, sign_law = 0.0, 0.0, 0.0
        for k in range(lat.dim):
            x = rng.normal(size=(comb(lat.dim, k),) + lat.sizes)
            dx = coboundary(lat, x, k)
            if k + 1 < lat.dim:
                dd = max(dd, float(np.max(np.abs(coboundary(lat, dx, k + 1)))) / float(np.max(np.abs(x))))
            y = rng.normal(size=dx.shape)
            lhs, rhs = inner(lat, dx, y), inner(lat, x, coboundary_adjoint(lat, y, k))
            adjoint = max(adjoint, abs(lhs - rhs) / (norm(lat, dx) * norm(lat, y)))
        for k in range(lat.dim + 1):
            x = rng.normal(size=(comb(lat.dim, k),) + lat.sizes)
            twice = hodge_values(lat, hodge_values(lat, x, k), lat.dim - k)
            sign_law = max(sign_law, float(np.max(np.abs(twice - (-1) ** (k * (lat.dim - k)) * x))))
        checks.append(_check(f"d_squared_{tag}", dd, 1e-12))
        checks.append(_check(f"adjointness_{tag}", adjoint, 1e-12))
        checks.append(_check(f"hodge_sign_law_{tag}", sign_law, 0.0))

    lat = TorusLattice(sizes=(8, 8, 8, 8), spacings=(1.0, 0.9, 1.1, 1.0))
    n = (3, 1, 0, 0)
    wave = np.exp(2j * np.pi * sum(k * lat.index_grid(u) / lat.sizes[u] for u, k in enumerate(n)))
    laplace = coboundary_adjoint(lat, coboundary(lat, wave[np.newaxis], 0), 0)[0]
    expected = sum(
        4.0 / h**2 * np.sin(np.pi * k / size) ** 2 for k, h, size in zip(n, lat.spacings, lat.sizes)
    )
    checks.append(_check("laplacian_plane_wave", np.max(np.abs(laplace - expected * wave)), 1e-12))

    lat = ctx.lattice(4)
    worst_total, worst_plaquette = 0.0, 0.0
    for p, (u, v) in enumerate(lat.faces(2)):
        for m in range(-3, 4):
            bg = flux_background(lat, _flux(4, **{f"p{u}{v}": m}))
            c = random_config(lat, bg, seed=ctx.seed + p, psi_amplitude=0.0)
            total = plaquette_flux(lat, bg.f0 + coboundary(lat, c.a, 1))[u, v]
            worst_total = max(worst_total, abs(total - 2 * np.pi * m))
            area = lat.spacings[u] * lat.spacings[v]
            holonomy = coboundary(lat, bg.a0, 1)[p] * area + 2 * np.pi * bg.dirac_string[p]
            worst_plaquette = max(worst_plaquette, float(np.max(np.abs(holonomy - bg.f0[p] * area))))
    checks.append(_check("flux_quantization", worst_total, 1e-12, "|m| <= 3, every plane"))
    checks.append(_check("plaquette_holonomy", worst_plaquette, 1e-12))
    return checks


# ---------------------------------------------------------------------------
# weitzenbock
# ---------------------------------------------------------------------------


def weitzenbock_refinement(
    dim: int, sizes: tuple[int, ...], length: float, seed: int
) -> list[tuple[float, float]]:
    """(h, defect / ||psi||) for one continuum field on refined tori.

    The spinor is a smooth section of the flux bundle, so every lattice
    samples the same continuum configuration.
    """
    m = _flux(dim, p01=2)
    rows = []
    for n in sizes:
        lat = TorusLattice.cubic(dim, n, length / n)
        c = random_config(lat, flux_background(lat, m), seed, amplitude=0.5, kmax=1, section=True)
        rows.append((lat.spacings[0], weitzenbock_residual(c).relative))
        logger.debug("weitzenbock n=%d relative residual %.3e", n, rows[-1][1])
    return rows


def pairwise_orders(rows: list[tuple[float, float]]) -> list[float]:
    """Observed order between each pair of successive refinements."""
    return [
        float(np.log(r0 / r1) / np.log(h0 / h1)) for (h0, r0), (h1, r1) in zip(rows, rows[1:])
    ]


def convergence_order(rows: list[tuple[float, float]]) -> float:
    """Order on the finest pair, where the field is best resolved."""
    return pairwise_orders(rows)[-1]


def weitzenbock_suite(ctx: SuiteContext) -> list[CheckResult]:
    checks = []
    lat = ctx.lattice(ctx.weitzenbock_dim)
    flat = random_config(lat, flux_background(lat), ctx.seed)
    g = random_gauge_map(lat, ctx.seed + 1, max_winding=2)
    flat = flat.with_fields(a=g.connection_shift(lat))
    checks.append(_check("flat_exactness", weitzenbock_residual(flat).relative, 1e-12))

    rows = weitzenbock_refinement(ctx.weitzenbock_dim, ctx.sizes, ctx.length, ctx.seed)
    detail = ", ".join(f"h={h:.4g}: {r:.3e}" for h, r in rows)
    detail += "; orders " + ", ".join(f"{p:.3f}" for p in pairwise_orders(rows))
    order = convergence_order(rows)
    checks.append(
        CheckResult(name="refinement_order", passed=order >= 1.9, value=order, threshold=1.9, detail=detail)
    )
    return checks


# ---------------------------------------------------------------------------
# gradient
# ---------------------------------------------------------------------------


def gradient_suite(ctx: SuiteContext) -> list[CheckResult]:
    rng = np.random.default_rng(ctx.seed)
    lat = ctx.lattice(4)
    bg = flux_background(lat, _flux(4, p01=2, p23=-2))
    p = FunctionalParams(kappa=-1.0, eta=constant_eta(lat, 0.3))
    eps = 1e-5
    worst = 0.0
    for b in range(ctx.bases):
        c = random_config(lat, bg, ctx.seed + b)
        g = gradient(c, p)
        for _ in range(ctx.directions):
            v = _random_tangent(c, rng)
            fd = (action(c.step(v, eps), p) - action(c.step(v, -eps), p)) / (2 * eps)
            worst = max(worst, _relative(fd, g.dot(lat, v)))
    checks = [
        _check("directional_derivative", worst, 1e-6, f"{ctx.bases} bases x {ctx.directions} directions")
    ]

    flat = random_config(lat, flux_background(lat), ctx.seed)
    flat = flat.with_fields(a=random_gauge_map(lat, ctx.seed, max_winding=1).connection_shift(lat))
    raw = action(flat, FunctionalParams(form=FunctionalForm.RAW))
    weitzenbock = action(flat, FunctionalParams())
    checks.append(_check("raw_equals_weitzenbock_flat", _relative(raw, weitzenbock), 1e-10))

    c = random_config(lat, bg, ctx.seed + 100)
    op = linearize(c)
    worst = 0.0
    for _ in range(3):
        v = _random_tangent(c, rng)
        plus, minus = sw_residual(c.step(v, 1e-6)), sw_residual(c.step(v, -1e-6))
        fd = ((plus.dirac - minus.dirac) / 2e-6, (plus.curv - minus.curv) / 2e-6)
        exact = op.apply(v)
        gap = (fd[0] - exact[0], fd[1] - exact[1])
        worst = max(worst, np.sqrt(residual_inner(c, gap, gap) / residual_inner(c, exact, exact)))
    checks.append(_check("linearization", worst, 1e-6))

    chi = rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape)
    lhs, rhs = inner(lat, dirac(c), chi), inner(lat, c.psi, dirac_minus(c, chi))
    checks.append(_check("dirac_adjoint", _relative(lhs, rhs), 1e-12))
    return checks


# ---------------------------------------------------------------------------
# gauge
# ---------------------------------------------------------------------------


def gauge_suite(ctx: SuiteContext) -> list[CheckResult]:
    rng = np.random.default_rng(ctx.seed)
    lat = ctx.lattice(4)
    bg = flux_background(lat, _flux(4, p01=2, p13=2))
    p = FunctionalParams(kappa=-1.0, eta=constant_eta(lat, 0.3))
    c = random_config(lat, bg, ctx.seed)
    s0 = action(c, p)
    r0 = sw_residual(c, p.eta)
    worst_action, worst_residual, worst_period = 0.0, 0.0, 0.0
    for k in range(ctx.gauge_maps):
        g = random_gauge_map(lat, ctx.seed + 1 + k, amplitude=1.0, max_winding=2)
        moved = gauge_act(g, c)
        worst_action = max(worst_action, _relative(action(moved, p), s0))
        r = sw_residual(moved, p.eta)
        worst_residual = max(
            worst_residual, _relative(r.dirac_norm, r0.dirac_norm), _relative(r.curv_norm, r0.curv_norm)
        )
        shift = g.connection_shift(lat)
        for u, w in enumerate(g.winding):
            line = tuple(slice(None) if x == u else 0 for x in range(lat.dim))
            period = float(np.sum(shift[u][line])) * lat.spacings[u]
            worst_period = max(worst_period, abs(period - 4 * np.pi * w))
    checks = [
        _check("action_invariance", worst_action, 1e-11, f"{ctx.gauge_maps} gauge maps"),
        _check("residual_invariance", worst_residual, 1e-11),
        _check("winding_periods", worst_period, 1e-12),
    ]

    try:
        fixed, _ = coulomb_fix(c)
        divergence = norm(lat, coboundary_adjoint(lat, fixed.a, 0)) / norm(lat, c.a)
        checks.append(_check("coulomb_divergence", divergence, settings.GAUGE_TOL))
        checks.append(_check("coulomb_action", _relative(action(fixed, p), s0), 1e-11))
    except GaugeFixError as exc:
        checks.append(_flag("coulomb_divergence", False, str(exc)))

    f = rng.normal(size=lat.sizes)
    dirac_part, curv_part = linearize(c).apply_gauge(f)
    expected = 1j * f * dirac(c)
    gap = max(norm(lat, dirac_part - expected) / norm(lat, expected), norm(lat, curv_part) / norm(lat, expected))
    checks.append(_check("linearization_kills_gauge", gap, 1e-12))

    g1 = random_gauge_map(lat, ctx.seed + 500, max_winding=2)
    g2 = random_gauge_map(lat, ctx.seed + 501, max_winding=2)
    sequential = gauge_act(g2, gauge_act(g1, c))
    composed = gauge_act(g2.compose(g1), c)
    gap = max(
        norm(lat, sequential.a - composed.a) / norm(lat, composed.a),
        norm(lat, sequential.psi - composed.psi) / norm(lat, composed.psi),
    )
    back = gauge_act(g1.inverse(), gauge_act(g1, c))
    gap = max(gap, norm(lat, back.psi - c.psi) / norm(lat, c.psi))
    checks.append(_check("composition", gap, 1e-12))
    return checks


# ---------------------------------------------------------------------------
# kahler
# ---------------------------------------------------------------------------


def kahler_suite(ctx: SuiteContext) -> list[CheckResult]:
    ks = build_kahler_structure()
    plus, minus = derive_frames(ks.rep)
    frame_gap = max(float(np.max(np.abs(plus - FROZEN_PLUS_FRAME))), float(np.max(np.abs(minus - FROZEN_MINUS_FRAME))))
    checks = [_check("frame_regeneration", frame_gap, 1e-12)]

    lat = ctx.lattice(4)
    bg = flux_background(lat, _flux(4, p01=2, p02=-2))
    p = FunctionalParams(kappa=0.5, eta=constant_eta(lat, 0.25))
    worst_dirac, worst_curv, worst_split = 0.0, 0.0, 0.0
    for k in range(ctx.kahler_configs):
        c = random_config(lat, bg, ctx.seed + k)
        reference = dirac(c)
        worst_dirac = max(worst_dirac, norm(lat, dolbeault_dirac(ks, c) - reference) / norm(lat, reference))
        worst_curv = max(
            worst_curv, _relative(ksw_residual(ks, c, p.eta).total, sw_residual(c, p.eta).curv_norm)
        )
        if k < 10:
            worst_split = max(worst_split, split_action_matches(ks, c, p))
    checks.append(_check("dolbeault_dirac", worst_dirac, 1e-10, f"{ctx.kahler_configs} configs"))
    checks.append(_check("ksw_total", worst_curv, 1e-10))
    checks.append(_check("split_action", worst_split, 1e-10))

    c = random_config(lat, bg, ctx.seed)
    alpha, beta = split_spinor(ks, c.psi)
    flipped = c.with_fields(psi=join_spinor(ks, alpha, -beta))
    unperturbed = FunctionalParams(kappa=0.5)
    checks.append(
        _check(
            "beta_sign_symmetry",
            _relative(split_action(ks, flipped, unperturbed), split_action(ks, c, unperturbed)),
            1e-12,
        )
    )

    kinds = {}
    for m in (2, -2, 0):
        background = flux_background(lat, _flux(4, p01=m))
        kinds[m] = sign_diagnostic(ks, random_config(lat, background, ctx.seed)).kind
    ok = kinds == {2: SignKind.ALPHA_VANISHES, -2: SignKind.BETA_VANISHES, 0: SignKind.INDETERMINATE}
    checks.append(_flag("sign_diagnostic", ok, ", ".join(f"m01={m}: {k.value}" for m, k in kinds.items())))
    return checks


# ---------------------------------------------------------------------------
# reduce3d
# ---------------------------------------------------------------------------


def reduce3d_suite(ctx: SuiteContext) -> list[CheckResult]:
    rng = np.random.default_rng(ctx.seed)
    checks = []

    lat4 = ctx.lattice(4)
    c4 = random_config(lat4, flux_background(lat4, _flux(4, p12=2, p23=-2)), ctx.seed)
    c4 = c4.with_fields(a=np.concatenate([np.zeros((1,) + lat4.sizes), c4.a[1:]]))
    slicing = temporal_slice(c4)
    checks.append(_check("temporal_identity", slicing.identity_error(), 1e-10))
    try:
        temporal_slice(random_config(lat4, flux_background(lat4), ctx.seed))
        checks.append(_flag("temporal_gauge_rejected", False, "non-temporal configuration accepted"))
    except TemporalGaugeError as exc:
        checks.append(_flag("temporal_gauge_rejected", True, f"violation {exc.violation:.3g}"))

    lat = ctx.lattice(3)
    bg = flux_background(lat, _flux(3, p01=2))
    c = random_config(lat, bg, ctx.seed)
    rhs = flow_rhs(c)
    eps = 1e-5
    worst = 0.0
    for _ in range(ctx.directions):
        v = _random_tangent(c, rng)
        fd = (csd(c.step(v, eps)).value - csd(c.step(v, -eps)).value) / (2 * eps)
        worst = max(worst, _relative(fd, -rhs.dot(lat, v)))
    checks.append(_check("flow_rhs_is_gradient", worst, 1e-6))

    value = csd(c)
    checks.append(_check("dirac_term_real", abs(value.dirac_imag) / max(abs(value.dirac), 1.0), 1e-10))

    worst = 0.0
    windings = list(product(range(-2, 3), repeat=3))
    for k, planes in enumerate(product(range(-2, 3), repeat=3)):
        m = _flux(3, p01=planes[0], p02=planes[1], p12=planes[2])
        base = random_config(lat, flux_background(lat, m), ctx.seed + k, psi_amplitude=0.0)
        before = csd(base).value
        f = random_gauge_map(lat, ctx.seed + k).f
        for w in windings:
            after = csd(gauge_act(GaugeMap(f=f, winding=w), base)).value
            worst = max(worst, abs(after - before - gauge_shift_predicted(m, w)))
    checks.append(_check("gauge_shift", worst, 1e-8, "|m|, |w| <= 2"))

    run = csd_descent(c, steps=20)
    increase = max(np.diff(run.values), default=0.0)
    checks.append(_check("csd_descent_monotone", max(float(increase), 0.0), 0.0))
    return checks


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _solve_start(ctx: SuiteContext, kappa: float, seed: int) -> tuple[FlowResult, BoundsReport]:
    lat = ctx.lattice(4)
    p = FunctionalParams(kappa=kappa)
    c0 = random_config(lat, flux_background(lat), seed)
    opts = FlowOptions(tol=ctx.tol, max_iters=ctx.max_iters, gauge_fix_period=ctx.gauge_fix_period)
    result = flow_minimize(c0, p, opts)
    return result, bounds_report(result.config, p)


def bounds_suite(ctx: SuiteContext) -> list[CheckResult]:
    seeds = [ctx.seed + k for k in range(ctx.starts)]
    checks = []
    for kappa in (1.0, -1.0):
        with ThreadPoolExecutor(max_workers=max(1, ctx.threads)) as pool:
            try:
                runs = list(pool.map(lambda s: _solve_start(ctx, kappa, s), seeds))
            except SolverError as exc:
                checks.append(_flag(f"kappa{kappa:+g}_solve", False, str(exc)))
                continue
        converged = [(r, b) for r, b in runs if r.converged]
        label = f"kappa{kappa:+g}"
        checks.append(_flag(f"{label}_converged", len(converged) == len(runs), f"{len(converged)}/{len(runs)} runs"))
        if kappa > 0:
            psi_sup = max((float(np.sqrt(b.psi_sup2)) for _, b in runs), default=0.0)
            f_plus = max((norm(r.config.lat, sd_curvature(r.config)) for r, _ in runs), default=0.0)
            checks.append(_check(f"{label}_psi_vanishes", psi_sup, 1e-6))
            checks.append(_check(f"{label}_selfdual_curvature", f_plus, 1e-6))
        else:
            volume = ctx.lattice(4).volume
            psi_sup2 = max((b.psi_sup2 for _, b in converged), default=0.0)
            i_plus = max((b.i_plus for _, b in converged), default=0.0)
            checks.append(_check(f"{label}_psi_bound", psi_sup2, 1.0 + 1e-3))
            checks.append(_check(f"{label}_energy_bound", i_plus, volume / 8 + 1e-3))
    return checks


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------


def _diagonal_manifold(b1: int, signs: list[int]) -> FourManifoldData:
    rank = len(signs)
    form = [[signs[i] if i == j else 0 for j in range(rank)] for i in range(rank)]
    plus = sum(1 for s in signs if s > 0)
    return FourManifoldData(
        b1=b1,
        b2_plus=plus,
        b2_minus=rank - plus,
        intersection_form=form,
        euler=2 - 2 * b1 + rank,
        signature=2 * plus - rank,
    )


def _brute_force_classes(md: FourManifoldData, bound: int) -> list[list[int]]:
    q = md.intersection_form
    target = md.characteristic_number
    return [
        list(x)
        for x in product(range(-bound, bound + 1), repeat=len(q))
        if sum(q[i][i] * x[i] * x[i] for i in range(len(q))) == target
    ]


def topology_suite(ctx: SuiteContext) -> list[CheckResult]:
    rng = np.random.default_rng(ctx.seed)
    failures = 0
    trials = 10_000
    for _ in range(trials):
        rank = int(rng.integers(1, 6))
        md = _diagonal_manifold(int(rng.integers(0, 3)), [int(s) for s in rng.choice([-1, 1], size=rank)])
        s = SpinCClass(c1=[int(v) for v in rng.integers(-9, 10, size=rank)])
        if sw_dimension(md, s) != dirac_index(md, s) - asd_index(md):
            failures += 1
    checks = [_check("index_identity", failures, 0, f"{trials} random inputs")]

    dims = {n: sw_dimension(*blow_up_family(n)) for n in range(1, 7)}
    checks.append(_flag("blow_up_dimension_zero", all(d == 0 for d in dims.values())))
    checks.append(_flag("k3_dimension_zero", sw_dimension(k3_data(), SpinCClass(c1=[0] * 22)) == 0))
    table = {d: thom_genus_bound(d) for d in range(1, 11)}
    checks.append(_flag("thom_table", table == {d: (d - 1) * (d - 2) // 2 for d in range(1, 11)}))
    checks.append(_flag("connected_sum", connected_sum_invariant(1, 1) == "vanishes"))

    mismatches = []
    for rank in range(1, 5):
        for signs in product((1, -1), repeat=rank):
            md = _diagonal_manifold(0, list(signs))
            found = [s.c1 for s in basic_class_candidates(md, 3, threads=ctx.threads)]
            if found != _brute_force_classes(md, 3):
                mismatches.append(str(list(signs)))
    checks.append(_flag("enumerator_oracle", not mismatches, ", ".join(mismatches)))
    return checks


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


SUITES: dict[str, Callable[[SuiteContext], list[CheckResult]]] = {
    "clifford": clifford_suite,
    "lattice": lattice_suite,
    "weitzenbock": weitzenbock_suite,
    "gradient": gradient_suite,
    "gauge": gauge_suite,
    "kahler": kahler_suite,
    "reduce3d": reduce3d_suite,
    "bounds": bounds_suite,
    "topology": topology_suite,
}


def run_suite(name: str, ctx: SuiteContext | None = None) -> SuiteReport:
    """Run one suite; raises ``ValueError`` for an unknown name."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    ctx = ctx or SuiteContext()
    start = time.perf_counter()
    checks = SUITES[name](ctx)
    report = SuiteReport(suite=name, checks=checks, seconds=round(time.perf_counter() - start, 3))
    logger.info("suite %s: %d/%d checks passed", name, sum(c.passed for c in checks), len(checks))
    return report
