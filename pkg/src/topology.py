"""Closed-form topological calculators with exact rational arithmetic.

Spin^c classes are handled through the integral class x = c1(L^2); the
square c1(L)^2 is Q(x, x) / 4.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from itertools import product
from math import pi

from src.errors import TopologyError
from src.models import FourManifoldData, SpinCClass, TopologyQuery, TopologyReport, TopologyRow

logger = logging.getLogger(__name__)

MAX_BOX = 10_000_000


def _pair(q: list[list[int]], x: list[int], y: list[int]) -> int:
    return sum(x[i] * q[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))


def _check_class(md: FourManifoldData, s: SpinCClass) -> None:
    if len(s.c1) != len(md.intersection_form):
        raise TopologyError(
            f"class has {len(s.c1)} coordinates, intersection form has rank "
            f"{len(md.intersection_form)}"
        )


def c1_squared(md: FourManifoldData, s: SpinCClass) -> Fraction:
    _check_class(md, s)
    return Fraction(_pair(md.intersection_form, s.c1, s.c1), 4)


def sw_dimension(md: FourManifoldData, s: SpinCClass) -> Fraction:
    """c1(L)^2 - (2 chi + 3 sigma) / 4."""
    return c1_squared(md, s) - Fraction(2 * md.euler + 3 * md.signature, 4)


def dirac_index(md: FourManifoldData, s: SpinCClass) -> Fraction:
    """Real index of the twisted Dirac operator, c1(L)^2 - sigma / 4."""
    _check_class(md, s)
    square = Fraction(_pair(md.intersection_form, s.c1, s.c1))
    return (square - md.signature) / 4


def asd_index(md: FourManifoldData) -> Fraction:
    """(chi + sigma) / 2 = 1 - b1 + b2+, minus the index of d^* + d^+."""
    return Fraction(md.euler + md.signature, 2)


def is_characteristic(md: FourManifoldData, x: list[int]) -> bool:
    """Q(x, y) = Q(y, y) mod 2 for every y."""
    q = md.intersection_form
    return all(
        (sum(x[j] * q[i][j] for j in range(len(x))) - q[i][i]) % 2 == 0
        for i in range(len(x))
    )


def bareiss_determinant(matrix: list[list[int]]) -> int:
    """Fraction-free exact determinant."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, previous = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
        previous = a[k][k]
    return sign * a[n - 1][n - 1]


def _scan_slab(q: list[list[int]], first: int, bound: int, target: int) -> list[list[int]]:
    rank = len(q)
    found = []
    for rest in product(range(-bound, bound + 1), repeat=rank - 1):
        x = [first, *rest]
        if _pair(q, x, x) == target:
            found.append(x)
    return found


def basic_class_candidates(
    md: FourManifoldData, bound: int, threads: int = 1, characteristic_only: bool = False
) -> list[SpinCClass]:
    """Every x in the box [-bound, bound]^rank with Q(x, x) = 2 chi + 3 sigma.

    The box is split into slabs of fixed first coordinate; slabs are merged
    in coordinate order whatever the thread count.
    """
    q = md.intersection_form
    if bound < 0:
        raise TopologyError("bound must be non-negative")
    if not q or bareiss_determinant(q) == 0:
        raise TopologyError("intersection form is degenerate")
    if (2 * bound + 1) ** len(q) > MAX_BOX:
        raise TopologyError(f"search box (2*{bound}+1)^{len(q)} exceeds {MAX_BOX} classes")
    target = md.characteristic_number
    firsts = range(-bound, bound + 1)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        slabs = list(pool.map(lambda first: _scan_slab(q, first, bound, target), firsts))
    classes = [x for slab in slabs for x in slab]
    if characteristic_only:
        classes = [x for x in classes if is_characteristic(md, x)]
    logger.info("basic_class_candidates: %d classes (bound %d)", len(classes), bound)
    return [SpinCClass(c1=x) for x in classes]


def thom_genus_bound(d: int) -> int:
    """Minimal genus of an embedded surface of degree d in CP^2."""
    if d < 1:
        raise TopologyError("degree must be at least 1")
    return (d - 1) * (d - 2) // 2


def curvature_estimate_bound(g: int) -> dict[str, float]:
    """|F| <= 2 pi (2g - 2) and the intermediate |psi|^2 <= 4 pi (2g - 2)."""
    if g < 1:
        raise TopologyError("genus must be at least 1")
    return {"curvature": 2 * pi * (2 * g - 2), "psi_squared": 4 * pi * (2 * g - 2)}


def gromov_dimension(c1k_dot_a: int, a_squared: int) -> int:
    return -c1k_dot_a + a_squared


def nonabelian_dimension(n: int, c2: int, chi: int, sigma: int, delta: int) -> Fraction:
    """(4N - 2) c2 - (N^2 - 1)/2 (chi + sigma) - delta sigma / 4."""
    if n < 2:
        raise TopologyError("rank must be at least 2")
    return (
        Fraction((4 * n - 2) * c2)
        - Fraction(n * n - 1, 2) * (chi + sigma)
        - Fraction(delta * sigma, 4)
    )


def connected_sum_invariant(b2plus_1: int, b2plus_2: int) -> str:
    if b2plus_1 >= 1 and b2plus_2 >= 1:
        return "vanishes"
    return "no conclusion"


class CountingRule(str, Enum):
    ZERO_NEGATIVE = "zero: negative dimension, generically empty"
    SIGNED_COUNT = "signed count of points"
    ZERO_ODD = "zero: odd dimension"
    PAIRING = "pairing with c1^(d/2)"
    ZERO_NONINTEGRAL = "zero: dimension not an integer, no such structure"


def invariant_counting_rules(dim: Fraction | int) -> tuple[CountingRule, int | None]:
    """Rule used to extract the invariant; the second entry is the pairing degree d/2."""
    dim = Fraction(dim)
    if dim.denominator != 1:
        return CountingRule.ZERO_NONINTEGRAL, None
    d = dim.numerator
    if d < 0:
        return CountingRule.ZERO_NEGATIVE, None
    if d == 0:
        return CountingRule.SIGNED_COUNT, None
    if d % 2:
        return CountingRule.ZERO_ODD, None
    return CountingRule.PAIRING, d // 2


# --- standard manifolds ---


def connected_sum(x: FourManifoldData, y: FourManifoldData, name: str = "") -> FourManifoldData:
    """chi = chi1 + chi2 - 2, sigma adds, b1 adds, forms add block-diagonally."""
    qx, qy = x.intersection_form, y.intersection_form
    rank = len(qx) + len(qy)
    form = [[0] * rank for _ in range(rank)]
    for i, row in enumerate(qx):
        form[i][: len(qx)] = list(row)
    for i, row in enumerate(qy):
        form[len(qx) + i][len(qx) :] = list(row)
    return FourManifoldData(
        name=name or f"{x.name}#{y.name}",
        b1=x.b1 + y.b1,
        b2_plus=x.b2_plus + y.b2_plus,
        b2_minus=x.b2_minus + y.b2_minus,
        intersection_form=form,
        euler=x.euler + y.euler - 2,
        signature=x.signature + y.signature,
    )


def cp2() -> FourManifoldData:
    return FourManifoldData(
        name="CP2", b1=0, b2_plus=1, b2_minus=0, intersection_form=[[1]], euler=3, signature=1
    )


def cp2_bar() -> FourManifoldData:
    return FourManifoldData(
        name="CP2bar", b1=0, b2_plus=0, b2_minus=1, intersection_form=[[-1]], euler=3, signature=-1
    )


def blow_up_family(n: int) -> tuple[FourManifoldData, SpinCClass]:
    """CP^2 # n CP^2-bar with its canonical class K = -3H + E_1 + ... + E_n.

    K^2 = 9 - n = 2 chi + 3 sigma, so the canonical class has dimension 0.
    """
    if n < 0:
        raise TopologyError("number of blow-ups must be non-negative")
    md = cp2()
    for _ in range(n):
        md = connected_sum(md, cp2_bar())
    md = md.model_copy(update={"name": f"CP2#{n}CP2bar"})
    return md, SpinCClass(c1=[-3] + [1] * n)


def k3_data() -> FourManifoldData:
    """K3: b2+ = 3, b2- = 19, form 3H + 2(-E8)."""
    e8 = [
        [2, -1, 0, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0, 0],
        [0, 0, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, -1],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, 0],
        [0, 0, 0, 0, -1, 0, 0, 2],
    ]
    blocks = [[[0, 1], [1, 0]]] * 3 + [[[-v for v in row] for row in e8]] * 2
    rank = sum(len(b) for b in blocks)
    form = [[0] * rank for _ in range(rank)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            form[offset + i][offset : offset + len(block)] = list(row)
        offset += len(block)
    return FourManifoldData(
        name="K3", b1=0, b2_plus=3, b2_minus=19, intersection_form=form, euler=24, signature=-16
    )


def spinc_counting_note() -> str:
    return (
        "Spin^c structures are parametrized by 2H^2(X;Z) + H^1(X;Z_2); the enumeration "
        "searches values of c1(L^2) only, so structures differing by 2-torsion are merged."
    )


def topology_report(
    md: FourManifoldData,
    classes: list[SpinCClass] | None = None,
    bound: int | None = None,
    threads: int = 1,
    characteristic_only: bool = False,
) -> TopologyReport:
    """Dimension/index table for ``classes`` plus the basic-class search."""
    report = TopologyReport(manifold=md.name or "unnamed", notes=[spinc_counting_note()])
    if bound is not None:
        found = basic_class_candidates(
            md, bound, threads=threads, characteristic_only=characteristic_only
        )
        report.basic_classes = [s.c1 for s in found]
        classes = list(classes or []) + found
    for s in classes or []:
        dim = sw_dimension(md, s)
        dirac = dirac_index(md, s)
        asd = asd_index(md)
        if dim != dirac - asd:
            raise TopologyError(f"index identity failed for {s.c1}: {dim} != {dirac} - {asd}")
        rule, degree = invariant_counting_rules(dim)
        report.rows.append(
            TopologyRow(
                c1=s.c1,
                c1_squared=str(c1_squared(md, s)),
                dimension=str(dim),
                dirac_index=str(dirac),
                asd_index=str(asd),
                characteristic=is_characteristic(md, s.c1),
                count_rule=rule.value if degree is None else f"{rule.value} (degree {degree})",
                vanishing_reason=rule.value if degree is None and rule is not CountingRule.SIGNED_COUNT else "",
            )
        )
    return report


def answer_query(query: TopologyQuery, threads: int = 1) -> TopologyReport:
    """Everything the topology command tabulates for one input file."""
    report = topology_report(
        query.manifold,
        [SpinCClass(c1=x) for x in query.classes],
        bound=query.bound,
        threads=threads,
        characteristic_only=query.characteristic_only,
    )
    report.genus_table = [(d, thom_genus_bound(d)) for d in query.thom_degrees]
    for g in query.genera:
        bounds = curvature_estimate_bound(g)
        report.curvature_bounds.append((g, bounds["curvature"], bounds["psi_squared"]))
    if query.connected_sum is not None:
        report.connected_sum = connected_sum_invariant(*query.connected_sum)
    return report
