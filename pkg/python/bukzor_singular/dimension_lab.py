"""Empirical dimension diagnostics for finite ball trees.

Four estimators live here:

- the counting profile, which compares card(S ∩ B(a, r))/r^s on a node's
  scene with the counting bound 72·C0⁴·max{…};
- box counting on exact dyadic grids, with a least-squares slope;
- local dimensions log μ(B)/log(diam B/diam B_root) of a cylinder measure;
- the truncated audit of the upper covering σ_μ(x) = ∪_{y∈E(x)} D(y),
  which sums diam B(z)^s over the heights below a cutoff.

The counting profile takes its ball centers from the points of S and the
midpoints of close pairs. That lower-bounds the true maximum over a ∈ R²,
so a reported violation is real evidence while a pass is only a heuristic.
"""

from __future__ import annotations

import bisect
import itertools
import logging
import math
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import mpmath
import numpy as np

from bukzor_singular.cantor.base import BallTree
from bukzor_singular.cantor.measure import CylinderMeasure
from bukzor_singular.cantor.params import TreeParams
from bukzor_singular.cantor.tiling import TilingCell
from bukzor_singular.cantor.tiling import build_tiling
from bukzor_singular.cantor.tree import CantorTree
from bukzor_singular.cantor.tree import Check
from bukzor_singular.cantor.tree import Edge
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.certified import dyadic_floor
from bukzor_singular.certified import sqrt_le_power
from bukzor_singular.config import AUDIT_BUDGET
from bukzor_singular.config import C0_TILING
from bukzor_singular.config import TILING_LIMIT
from bukzor_singular.errors import BudgetExceeded
from bukzor_singular.errors import DegenerateScales
from bukzor_singular.errors import DepthInsufficient
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import HeightTooSmall
from bukzor_singular.exponents import CoveringExponents
from bukzor_singular.exponents import covering_exponents
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import farey_lattice
from bukzor_singular.rational_geometry import in_Q_mu
from bukzor_singular.rational_geometry import lift
from bukzor_singular.rational_geometry import point_distance_sq
from bukzor_singular.rational_geometry import sublattice_H
from bukzor_singular.types import NodeId
from bukzor_singular.types import RationalPoint

logger = logging.getLogger(__name__)

COUNTING_STEPS = 24  # radii in the default grid
AUDIT_DIGITS = 30
LOCAL_TOLERANCE = Fraction(1, 5)
LOCAL_SHARE = 0.1  # flag when more leaves than this fall below s − tol


def _run(fn: Callable[[Any], Any], jobs: list[Any], workers: int) -> list[Any]:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# Counting profile


@dataclass(frozen=True, slots=True)
class CountingScene:
    """Points S = ∪ D_y around the E-points y of one node.

    R0 is the node's ball radius, R1 bounds d(ŷ, ẑ) for every cluster, R2
    is the spacing inside a cluster and R3 the radius of a child ball.
    H × V is the size of the cells of the distorted tiling.
    """

    R0: CertifiedReal
    R1: CertifiedReal
    R2: CertifiedReal
    R3: CertifiedReal
    H: CertifiedReal
    V: CertifiedReal
    C0: Fraction
    clusters: tuple[tuple[RationalPoint, tuple[RationalPoint, ...]], ...]
    tiles: tuple[TilingCell, ...] = ()

    @property
    def points(self) -> list[RationalPoint]:
        return [z for _, zs in self.clusters for z in zs]

    def hypotheses(self) -> tuple[Check, ...]:
        """The assumptions under which the counting bound is proved."""
        R0, R1, R2, R3 = self.R0, self.R1, self.R2, self.R3
        most = (2 * R1 / R2).floor()
        inside = all(
            point_distance_sq(y, z) <= R1.upper**2
            for y, zs in self.clusters
            for z in zs
        )
        return (
            Check("radii_ordered", R0 > R1 and R1 > R2 and R2 > R3),
            Check("tile_width", R0 / self.C0 >= self.H),
            Check("tile_height", self.V >= R1 / self.C0),
            Check(
                "cluster_size",
                all(len(zs) <= most for _, zs in self.clusters),
                detail=f"at most {most} per cluster",
            ),
            Check("cluster_inside", inside),
        )


def scene_from_node(
    tree: CantorTree, node: NodeId, tiling_limit: int = TILING_LIMIT
) -> CountingScene:
    """Scene of a node from its children and their E₁ witnesses."""
    kids = [tree.node(c) for c in tree.children_of(node)]
    if not kids:
        raise DepthInsufficient(f"node {node} has no children")
    edges = [(k.witness, k.x) for k in kids if k.witness is not None]
    return scene_of(tree.node(node).x, edges, tree.params, tiling_limit)


def scene_of(
    x: PrimitiveVector,
    edges: Sequence[Edge],
    params: TreeParams,
    tiling_limit: int = TILING_LIMIT,
) -> CountingScene:
    """Scene of x over the given edges (capped children or all of σ(x))."""
    clusters: dict[PrimitiveVector, list[RationalPoint]] = {}
    for w, z in edges:
        clusters.setdefault(w.y, []).append(z.point)
    # rational upper bound of max λ₁(y)/|y|, scaled by the D₁ width c1
    spread = max(
        (farey_lattice(y).lambda1() / y.q).upper for y in clusters
    )
    lowest = min(z.q for _, z in edges)
    tiling = build_tiling(x, params, tiling_limit)
    return CountingScene(
        R0=params.ball_radius(x.q),
        R1=CertifiedReal.exact(params.c1 * spread),
        R2=params.separation(x.q),
        R3=params.ball_radius(lowest),
        H=tiling.H,
        V=tiling.V,
        C0=C0_TILING,
        clusters=tuple(
            (y.point, tuple(zs))
            for y, zs in sorted(
                clusters.items(), key=lambda item: item[0].as_tuple()
            )
        ),
        tiles=tiling.cells,
    )


def _check_s(s: Fraction) -> Fraction:
    s = Fraction(s)
    if not 0 < s <= 2:
        raise DomainError(f"counting exponent must lie in (0, 2]: {s}")
    return s


def counting_bound(scene: CountingScene, s: Fraction) -> CertifiedReal:
    """72·C0⁴·max{R3^{−s}, R1^{1−s}/R2 (s < 1 only), R1R0²/(VHR2)·R0^{−s}}.

    The maximum is replaced by a rational upper bound.
    """
    s = _check_s(s)
    R0, R1, R2, R3 = scene.R0, scene.R1, scene.R2, scene.R3
    terms = [1 / R3**s, R1 * R0 * R0 / (scene.V * scene.H * R2) / R0**s]
    if s < 1:
        terms.append(R1 / (R2 * R1**s))
    return 72 * scene.C0**4 * CertifiedReal.exact(max(t.upper for t in terms))


def counting_cases(
    scene: CountingScene, s: Fraction, r: Fraction
) -> tuple[int, CertifiedReal]:
    """(case, g(r)) of the five radius ranges of the counting argument."""
    s, r = _check_s(s), Fraction(r)
    C0 = scene.C0
    V, H = scene.V, scene.H
    if V > H:
        V, H = H, V
    R1, R2 = scene.R1, scene.R2
    if r <= R2:
        return 1, 72 * C0**4 * CertifiedReal.power(r, -s)
    if r <= R1:
        return 2, 72 * C0**4 * CertifiedReal.power(r, 1 - s) / R2
    if r <= C0 * V:
        return 3, 72 * C0**4 * R1 / R2 * CertifiedReal.power(r, -s)
    if r <= C0 * H:
        return 4, 72 * C0**3 * R1 / (V * R2) * CertifiedReal.power(r, 1 - s)
    return 5, 72 * C0**2 * R1 / (V * H * R2) * CertifiedReal.power(r, 2 - s)


@dataclass(frozen=True, slots=True)
class CountingRow:
    r: Fraction
    count: int
    center: RationalPoint | None
    f: CertifiedReal
    bound: CertifiedReal
    case: int
    g: CertifiedReal

    @property
    def violated(self) -> bool:
        """f(r) is certainly above the counting bound."""
        return self.f.lower > self.bound.upper

    @property
    def above_case(self) -> bool:
        return self.f.lower > self.g.upper


@dataclass(frozen=True, slots=True)
class CountingReport:
    s: Fraction
    rows: tuple[CountingRow, ...]
    hypotheses: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return not any(row.violated for row in self.rows)

    @property
    def hypotheses_ok(self) -> bool:
        return all(c.ok for c in self.hypotheses)


def default_radii(
    scene: CountingScene, steps: int = COUNTING_STEPS
) -> list[Fraction]:
    """Dyadic radii from just below R0 down to R3, at most *steps* of them."""
    r = dyadic_floor(scene.R0)
    radii = []
    while r >= scene.R3.upper:
        radii.append(r)
        r /= 2
    if not radii:
        return []
    if len(radii) > steps:
        stride = (len(radii) - 1) / (steps - 1)
        radii = [radii[round(i * stride)] for i in range(steps)]
    return sorted(radii)


def _centers(
    points: Sequence[RationalPoint], r: Fraction
) -> list[RationalPoint]:
    """The points themselves and the midpoints of pairs at most 2r apart."""
    found = set(points)
    reach = 4 * r * r
    ordered = sorted(set(points))
    for i, p in enumerate(ordered):
        for q in ordered[i + 1 :]:
            if q[0] - p[0] > 2 * r:
                break
            if point_distance_sq(p, q) <= reach:
                found.add(((p[0] + q[0]) / 2, (p[1] + q[1]) / 2))
    return sorted(found)


def ball_count(
    points: Sequence[RationalPoint], r: Fraction
) -> tuple[int, RationalPoint | None]:
    """Largest card(S ∩ B(a, r)) over the candidate centers, and its a."""
    ordered = sorted(points)
    xs = [p[0] for p in ordered]
    best, where = 0, None
    for a in _centers(ordered, r):
        lo = bisect.bisect_left(xs, a[0] - r)
        hi = bisect.bisect_right(xs, a[0] + r)
        n = sum(
            1 for p in ordered[lo:hi] if point_distance_sq(a, p) <= r * r
        )
        if n > best:
            best, where = n, a
    return best, where


def _profile_row(job: tuple[CountingScene, Fraction, Fraction]) -> CountingRow:
    scene, s, r = job
    count, center = ball_count(scene.points, r)
    f = count * CertifiedReal.power(r, -s)
    case, g = counting_cases(scene, s, r)
    return CountingRow(r, count, center, f, counting_bound(scene, s), case, g)


def counting_profile(
    scene: CountingScene,
    s: Fraction,
    r_grid: Iterable[Fraction] | None = None,
    jobs: int = 1,
) -> CountingReport:
    """f(r) = max_a card(S ∩ B(a, r))/r^s against the counting bound."""
    s = _check_s(s)
    radii = (
        default_radii(scene)
        if r_grid is None
        else sorted(Fraction(r) for r in r_grid)
    )
    for r in radii:
        if r < scene.R3 or r > scene.R0:
            raise ValueError(f"radius {r} lies outside [R3, R0]")
    rows = _run(_profile_row, [(scene, s, r) for r in radii], jobs)
    report = CountingReport(s, tuple(rows), scene.hypotheses())
    for row in report.rows:
        if row.violated:
            logger.warning(
                "counting bound exceeded at r=%s: %d points",
                float(row.r),
                row.count,
            )
    logger.info("counting profile: %d radii at s=%s", len(rows), s)
    return report


# Box counting


@dataclass(frozen=True, slots=True)
class BoxCount:
    scales: tuple[Fraction, ...]
    counts: tuple[int, ...]
    slope: float
    stderr: float

    def band(self, width: float = 2.0) -> tuple[float, float]:
        """slope ± width·stderr."""
        margin = width * self.stderr
        return self.slope - margin, self.slope + margin

    def within(self, target: float, tolerance: float) -> bool:
        return abs(self.slope - target) <= tolerance


def box_occupancy(points: Iterable[RationalPoint], delta: Fraction) -> int:
    """Number of grid boxes [kδ, (k+1)δ)² that hold a point."""
    boxes = {(math.floor(a / delta), math.floor(b / delta)) for a, b in points}
    return len(boxes)


def boxcount(
    points: Sequence[RationalPoint], scales: Iterable[Fraction]
) -> BoxCount:
    """Least-squares slope of log N(δ) against log(1/δ)."""
    deltas = sorted({Fraction(d) for d in scales}, reverse=True)
    if len(deltas) < 2:
        raise DegenerateScales(f"need two distinct scales, got {deltas}")
    if deltas[-1] <= 0:
        raise DegenerateScales(f"scales must be positive: {deltas[-1]}")
    if not points:
        raise DegenerateScales("no points to count")
    counts = [box_occupancy(points, d) for d in deltas]
    x = np.array([-math.log(d) for d in deltas])
    y = np.log(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    stderr = 0.0
    if len(x) > 2:
        residuals = y - (slope * x + intercept)
        spread = float(np.sum((x - x.mean()) ** 2))
        stderr = math.sqrt(float(np.sum(residuals**2)) / (len(x) - 2) / spread)
    return BoxCount(tuple(deltas), tuple(counts), float(slope), stderr)


def leaf_points(tree: BallTree) -> list[RationalPoint]:
    """Centers of the leaf balls, one per extracted point."""
    return [tree.center(leaf) for leaf in tree.leaves()]


# Local dimension


def _log_ratio(a: CertifiedReal, b: CertifiedReal) -> CertifiedReal:
    """ln a / ln b, exact when a is a rational power of b."""
    la, lb = a.ln(), b.ln()
    if a.is_exact and b.is_exact:
        guess = (la.midpoint / lb.midpoint).limit_denominator(64)
        p, q = guess.numerator, guess.denominator
        x, y = a.lower, b.lower
        size = max(x.numerator.bit_length(), x.denominator.bit_length())
        size += max(y.numerator.bit_length(), y.denominator.bit_length())
        if size * max(abs(p), q) <= 1 << 16 and x**q == y**p:
            return CertifiedReal.exact(guess)
    return la / lb


@dataclass(frozen=True, slots=True)
class LocalDimension:
    s: Fraction
    rows: tuple[tuple[NodeId, CertifiedReal], ...]
    quantiles: dict[str, float]
    share_below: float
    tolerance: Fraction

    @property
    def flagged(self) -> bool:
        """Too many leaves sit below s − tolerance."""
        return self.share_below > LOCAL_SHARE


def local_dimension(
    measure: CylinderMeasure,
    tree: BallTree,
    sample: int | None = None,
    tolerance: Fraction = LOCAL_TOLERANCE,
    seed: int | None = None,
) -> LocalDimension:
    """log μ(B)/log(diam B/diam B_root) at the leaves of *tree*.

    A sample is evenly strided over the leaves, or drawn at random when a
    seed is given.
    """
    leaves = [n for n in tree.leaves() if n != tree.root]
    if not leaves:
        raise DepthInsufficient("the tree has no leaf below its root")
    if sample is not None and len(leaves) > sample:
        if seed is None:
            step = len(leaves) / sample
            leaves = [leaves[int(i * step)] for i in range(sample)]
        else:
            rng = np.random.default_rng(seed)
            picked = rng.choice(len(leaves), size=sample, replace=False)
            leaves = [leaves[i] for i in sorted(picked.tolist())]
    base = tree.diameter(tree.root)
    rows = tuple(
        (
            leaf,
            _log_ratio(measure.weights[leaf], tree.diameter(leaf) / base),
        )
        for leaf in leaves
    )
    values = np.array([float(r.midpoint) for _, r in rows])
    q10, median, q90 = np.quantile(values, [0.1, 0.5, 0.9])
    floor = float(measure.s - tolerance)
    share = float(np.mean(values < floor))
    return LocalDimension(
        measure.s,
        rows,
        {"q10": float(q10), "median": float(median), "q90": float(q90)},
        share,
        tolerance,
    )


# Upper covering audit


@dataclass(frozen=True, slots=True)
class CoveringTerm:
    z: PrimitiveVector
    y: PrimitiveVector
    ratio: Any  # mpf: (diam B(z)/diam B(x))^s


@dataclass(frozen=True, slots=True)
class CoveringAudit:
    x: PrimitiveVector
    mu: Fraction
    s: Fraction
    gamma: Fraction
    cutoff: int
    e_count: int
    terms: tuple[CoveringTerm, ...]
    diam_x: Any  # mpf: diam B(x)^s at c = 1
    exponents: CoveringExponents

    @property
    def ratio(self) -> Any:
        """Σ diam B(z)^s / diam B(x)^s over the truncated σ_μ(x)."""
        return mpmath.fsum(t.ratio for t in self.terms)

    @property
    def partial_sum(self) -> Any:
        return self.ratio * self.diam_x

    def ratio_at(self, cutoff: int) -> Any:
        return mpmath.fsum(t.ratio for t in self.terms if t.z.q <= cutoff)

    @property
    def summable(self) -> bool:
        """The shell sums converge: b > 2 and (b − 1)/(1 − μ) − a > 2."""
        e = self.exponents
        return e.b > 2 and (e.b - 1) / (1 - self.mu) - e.a > 2

    @property
    def predicted_decay(self) -> Fraction:
        """Exponent of |x| bounding the ratio, using λ₂(x) ≫ |x|^{μ−1}."""
        e = self.exponents
        return e.B_minus_b - (1 - self.mu) * max(e.A_minus_a, Fraction(0))


def _log_diameter(z: PrimitiveVector, mu: Fraction, gamma: Fraction) -> Any:
    """ln diam B_{μ,γ}(z) − ln 2c."""
    lam2_sq = farey_lattice(z).lam2_sq
    ln_lam2 = (
        mpmath.log(lam2_sq.numerator) - mpmath.log(lam2_sq.denominator)
    ) / 2
    a = (1 - gamma) * mu
    b = (mu - 1) * mu * gamma + 1
    inner = _mpf(a) * ln_lam2 + _mpf(b) * mpmath.log(z.q)
    return -inner / _mpf(1 - mu)


def _mpf(value: Fraction) -> Any:
    return mpmath.mpf(value.numerator) / value.denominator


def _order(v: PrimitiveVector) -> tuple[int, int, int]:
    return v.q, v.p1, v.p2


@dataclass(slots=True)
class _Budget:
    limit: int
    what: str
    spent: int = 0

    def charge(self) -> None:
        self.spent += 1
        if self.spent > self.limit:
            raise BudgetExceeded(
                f"{self.what} passed {self.limit} candidates"
            )


def covering_E(
    x: PrimitiveVector, mu: Fraction, cutoff: int, budget: int = AUDIT_BUDGET
) -> list[PrimitiveVector]:
    """E(x) up to height *cutoff*, sorted by (|y|, p1, p2).

    y = y₀ + k·x over the primitive α = s·u1 + t·u2 with t ≠ 0, kept when
    ‖π_y(x)‖ = ‖α‖·|x|/|y| ≤ |y|^{−μ} and y ∈ Q_μ.
    """
    L = farey_lattice(x)
    q = x.q
    reach = CertifiedReal.power(cutoff, 2 * (1 - mu)).upper / (q * q)
    tmax = math.isqrt(math.floor(q * q * L.lam1_sq * reach))
    width = math.isqrt(math.ceil(reach / L.lam1_sq)) + 1
    spent = _Budget(budget, f"E({x})")
    found: list[PrimitiveVector] = []
    for t in range(-tmax, tmax + 1):
        if t == 0:
            continue
        centre = -t * L.u1.dot(L.u2) / L.lam1_sq
        for s in range(math.floor(centre) - width, math.ceil(centre) + width):
            if math.gcd(s, t) != 1:
                continue
            alpha = L.u1 * s + L.u2 * t
            if alpha.norm_sq > reach:
                continue
            y0 = lift(L, alpha)
            low = CertifiedReal.power(
                alpha.norm_sq * q * q, 1 / (2 * (1 - mu))
            )
            start = max(low.floor(), q + 1)
            k = -((y0[2] - start) // q)
            while (h := y0[2] + k * q) <= cutoff:
                spent.charge()
                y = PrimitiveVector(y0[0] + k * x.p1, y0[1] + k * x.p2, h)
                close = sqrt_le_power(alpha.norm_sq * q * q / (h * h), h, -mu)
                if close and in_Q_mu(y, mu):
                    found.append(y)
                k += 1
    return sorted(found, key=_order)


def covering_D(
    y: PrimitiveVector, mu: Fraction, cutoff: int, budget: int = AUDIT_BUDGET
) -> list[PrimitiveVector]:
    """D(y) up to height *cutoff*: z = a·y′ + k·y with |a|·|y| ≤ 4|z|."""
    _, yp = sublattice_H(y)
    n, q = yp[2], y.q
    spent = _Budget(budget, f"D({y})")
    found: list[PrimitiveVector] = []
    A = 4 * cutoff // q
    for a in range(-A, A + 1):
        lo = max(q, -(-abs(a) * q // 4))
        for k in range(-((a * n - lo) // q), (cutoff - a * n) // q + 1):
            if math.gcd(a, k) != 1:
                continue
            spent.charge()
            z = PrimitiveVector(
                a * yp[0] + k * y.p1, a * yp[1] + k * y.p2, a * n + k * q
            )
            if in_Q_mu(z, mu):
                found.append(z)
    return sorted(found, key=_order)


def upper_covering_audit(
    x: PrimitiveVector,
    mu: Fraction,
    s: Fraction,
    gamma: Fraction,
    height_cutoff: int,
    budget: int = AUDIT_BUDGET,
) -> CoveringAudit:
    """Σ_{z∈σ_μ(x), |z| ≤ cutoff} (diam B(z)/diam B(x))^s.

    The constant c of the balls cancels from every ratio.
    """
    mu, s, gamma = Fraction(mu), Fraction(s), Fraction(gamma)
    if not Fraction(1, 2) < mu < 1:
        raise DomainError(f"μ must lie in (1/2, 1): {mu}")
    if not 0 <= gamma < 1:
        raise DomainError(f"γ must lie in [0, 1): {gamma}")
    if s <= 0:
        raise DomainError(f"exponent must be positive: {s}")
    if not in_Q_mu(x, mu):
        raise HeightTooSmall(f"λ₁({x}) exceeds |x|^(-{mu})")
    if height_cutoff <= x.q:
        raise HeightTooSmall(f"cutoff {height_cutoff} is not above |x|")
    es = covering_E(x, mu, height_cutoff, budget)
    owners: dict[PrimitiveVector, PrimitiveVector] = {}
    for y in es:
        for z in covering_D(y, mu, height_cutoff, budget):
            owners.setdefault(z, y)
        if len(owners) > budget:
            raise BudgetExceeded(f"σ_μ({x}) passed {budget} points")
    with mpmath.workdps(AUDIT_DIGITS):
        base = _log_diameter(x, mu, gamma)
        sv = _mpf(s)
        terms: list[CoveringTerm] = []
        for z in sorted(owners, key=_order):
            gap = _log_diameter(z, mu, gamma) - base
            terms.append(CoveringTerm(z, owners[z], mpmath.exp(sv * gap)))
        diam_x = mpmath.exp(sv * (base + mpmath.log(2)))
    audit = CoveringAudit(
        x,
        mu,
        s,
        gamma,
        height_cutoff,
        len(es),
        tuple(terms),
        diam_x,
        covering_exponents(mu, s / (1 - mu), gamma),
    )
    logger.info(
        "σ_μ(%s) up to %d: %d of E, %d terms, ratio %s",
        x,
        height_cutoff,
        len(es),
        len(terms),
        mpmath.nstr(audit.ratio, 8),
    )
    return audit


@dataclass(frozen=True, slots=True)
class ShellRow:
    lo: int
    hi: int
    terms: int
    mass: Any  # mpf
    cumulative: Any  # mpf
    decrement: float | None  # log10(previous mass / mass)


def _decade(term: CoveringTerm) -> int:
    """j with 10^j < |z| ≤ 10^{j+1}."""
    return len(str(term.z.q - 1)) - 1


def audit_shells(audit: CoveringAudit) -> list[ShellRow]:
    """Per-decade shells (10^j, 10^{j+1}] of the audited heights."""
    rows: list[ShellRow] = []
    total = mpmath.mpf(0)
    for j, group in itertools.groupby(audit.terms, key=_decade):
        items = list(group)
        mass = mpmath.fsum(t.ratio for t in items)
        total += mass
        decrement = None
        if rows and mass > 0 and rows[-1].mass > 0:
            decrement = float(mpmath.log10(rows[-1].mass / mass))
        rows.append(
            ShellRow(10**j, 10 ** (j + 1), len(items), mass, total, decrement)
        )
    return rows
