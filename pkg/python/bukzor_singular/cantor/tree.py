"""The self-similar structure (Q_σ, σ, B) and its certified verification.

σ(x) is built in two steps. E₁(x) collects the points y = y₀ + k·x over
the lines π_x(y) = α_m = m·u1 + u2 with ‖m·u1‖ ≤ λ₂(x), at heights
|y| ∈ [Y, 2Y] where Y = c0·(‖α‖·|x|)^{1/(1−μ)}. D₁(y) collects the points
z = a·y′ + k·y of the plane H_y, y′ being a short lift of the generator of
Λ′_y, with ½|y|^{1+b} ≤ |z| ≤ |y|^{1+b} and d(ŷ, ẑ) ≤ c1·λ₁(y)/|y|.
Since π_y(z) = a·u1(y), that distance is exactly |a|·λ₁(y)/|z|.

Every y on a line is primitive because (m, 1) is primitive in Λ_x, and
every z is primitive exactly when gcd(a, k) = 1.

Statements that only hold "for |x| large enough" are replaced by checks at
each node. Structural checks (membership, nesting, disjointness) must pass
for a tree to be built. Band checks compare a value with its predicted
order of magnitude and are only reported.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from fractions import Fraction
from typing import Any
from typing import Self

from bukzor_singular.best_approx import TargetPoint
from bukzor_singular.cantor.base import BallTree
from bukzor_singular.cantor.params import TreeParams
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.certified import dyadic_floor
from bukzor_singular.config import AUDIT_BUDGET
from bukzor_singular.config import BAND_SCALE
from bukzor_singular.config import CALIBRATION_SAFETY
from bukzor_singular.config import D1_AREA_ESTIMATE_LIMIT
from bukzor_singular.config import ESTIMATE_SAMPLES
from bukzor_singular.config import NODE_BUDGET
from bukzor_singular.config import PACKING_K
from bukzor_singular.errors import BudgetExceeded
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import EmptyPath
from bukzor_singular.errors import HeightTooSmall
from bukzor_singular.rational_geometry import FareyLattice
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import Rational2Vector
from bukzor_singular.rational_geometry import basis_coordinates
from bukzor_singular.rational_geometry import farey_lattice
from bukzor_singular.rational_geometry import in_Q_mu
from bukzor_singular.rational_geometry import lift
from bukzor_singular.rational_geometry import member_H
from bukzor_singular.rational_geometry import point_distance_sq
from bukzor_singular.rational_geometry import project_along
from bukzor_singular.rational_geometry import sublattice_H
from bukzor_singular.types import IntVector3
from bukzor_singular.types import NodeId
from bukzor_singular.types import RationalPoint
from bukzor_singular.types import TreeCheck

logger = logging.getLogger(__name__)

# Check names reported by verify_node and sibling_checks, per CLI group.
CHECK_GROUPS: dict[TreeCheck, frozenset[str]] = {
    "nestedness": frozenset(
        {
            "legendre",
            "q_mu",
            "witness_in_E1",
            "child_in_D1",
            "nested_inner",
            "nested_outer",
        }
    ),
    "disjoint": frozenset({"disjoint", "d1_separation"}),
    "packing": frozenset(
        {"packing_ball", "packing_nested", "packing_disjoint"}
    ),
    "bands": frozenset(
        {
            "lambda1",
            "lambda2",
            "lambda1_y",
            "height_y",
            "distance_xy",
            "r2_separation",
        }
    ),
    "tiling": frozenset(),
    "counting": frozenset(),
}


@dataclass(frozen=True, slots=True)
class Witness:
    """y ∈ E₁(x) on the line α_m, with |y| = n₀ + k·|x|."""

    y: PrimitiveVector
    m: int
    k: int


@dataclass(frozen=True, slots=True)
class TreeNode:
    id: NodeId
    x: PrimitiveVector
    depth: int
    parent: NodeId | None = None
    witness: Witness | None = None

    @property
    def lattice(self) -> FareyLattice:
        return farey_lattice(self.x)


@dataclass(frozen=True, slots=True)
class Cardinality:
    value: int
    exact: bool


@dataclass(frozen=True, slots=True)
class Check:
    name: str
    ok: bool
    structural: bool = True
    exempt: bool = False
    detail: str = ""


@dataclass(frozen=True, slots=True)
class NodeReport:
    node: NodeId
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        """Every structural check passed."""
        return all(c.ok or c.exempt for c in self.checks if c.structural)

    @property
    def bands_ok(self) -> bool:
        return all(c.ok or c.exempt for c in self.checks if not c.structural)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not (c.ok or c.exempt)]

    def select(self, groups: Iterable[TreeCheck]) -> NodeReport:
        """Only the checks belonging to *groups*."""
        names = frozenset().union(*(CHECK_GROUPS[g] for g in groups))
        kept = tuple(c for c in self.checks if c.name in names)
        return NodeReport(self.node, kept)


# Plane geometry


def _dist(a: RationalPoint, b: RationalPoint) -> CertifiedReal:
    return CertifiedReal.sqrt(point_distance_sq(a, b))


def _inside(
    center: RationalPoint,
    radius: CertifiedReal,
    outer_center: RationalPoint,
    outer_radius: CertifiedReal,
) -> bool:
    """B(center, radius) lies in the interior of B(outer_center, ...)."""
    return _dist(center, outer_center) + radius < outer_radius


def _apart(
    c1: RationalPoint, r1: CertifiedReal, c2: RationalPoint, r2: CertifiedReal
) -> bool:
    return _dist(c1, c2) > r1 + r2


def _legendre_radius(x: PrimitiveVector) -> CertifiedReal:
    """λ₁(x)/(2|x|)."""
    return CertifiedReal.sqrt(farey_lattice(x).lam1_sq / (4 * x.q * x.q))


def _lambda1_over_height(y: PrimitiveVector) -> CertifiedReal:
    """λ₁(y)/|y|."""
    return CertifiedReal.sqrt(farey_lattice(y).lam1_sq / (y.q * y.q))


def _height_order(z: PrimitiveVector) -> tuple[int, int, int]:
    return z.q, z.p1, z.p2


def _ceil_div(p: int, q: int) -> int:
    return -(-p // q)


def _check_height(x: PrimitiveVector, params: TreeParams) -> None:
    if x.q < params.min_height:
        raise HeightTooSmall(
            f"|x| = {x.q} is below the minimum height {params.min_height}"
        )


def _sampled_sum(
    lo: int, hi: int, f: Callable[[int], int], limit: int
) -> Cardinality:
    """Σ f(i) over [lo, hi]; strided and scaled once past *limit* terms."""
    n = hi - lo + 1
    if n <= 0:
        return Cardinality(0, True)
    if n <= limit:
        return Cardinality(sum(f(i) for i in range(lo, hi + 1)), True)
    stride = _ceil_div(n, ESTIMATE_SAMPLES)
    sample = sum(f(i) for i in range(lo, hi + 1, stride))
    return Cardinality(sample * stride, False)


# E₁(x)


@dataclass(frozen=True, slots=True)
class _Line:
    """The points y₀ + k·x, kmin ≤ k ≤ kmax, over α_m."""

    m: int
    alpha: Rational2Vector
    y0: IntVector3
    kmin: int
    kmax: int

    def __len__(self) -> int:
        return max(0, self.kmax - self.kmin + 1)

    def point(self, x: PrimitiveVector, k: int) -> PrimitiveVector:
        y0 = self.y0
        return PrimitiveVector(
            y0[0] + k * x.p1, y0[1] + k * x.p2, y0[2] + k * x.q
        )

    def witness(self, x: PrimitiveVector, k: int) -> Witness:
        return Witness(self.point(x, k), self.m, k)


def _m_bound(L: FareyLattice) -> int:
    """Largest |m| with ‖m·u1‖ ≤ λ₂."""
    return math.isqrt(math.floor(L.lam2_sq / L.lam1_sq))


def _line(
    x: PrimitiveVector, L: FareyLattice, m: int, params: TreeParams
) -> _Line:
    alpha = L.u1 * m + L.u2
    y0 = lift(L, alpha)
    low = params.y_window(alpha.norm_sq, x.q)
    kmin = ((low - y0[2]) / x.q).ceil()
    kmax = ((2 * low - y0[2]) / x.q).floor()
    return _Line(m, alpha, y0, kmin, kmax)


def _lines(x: PrimitiveVector, params: TreeParams) -> Iterator[_Line]:
    """Lines of E₁(x) in the order m = 0, 1, −1, 2, −2, …"""
    _check_height(x, params)
    L = farey_lattice(x)
    yield _line(x, L, 0, params)
    for m in range(1, _m_bound(L) + 1):
        yield _line(x, L, m, params)
        yield _line(x, L, -m, params)


def enumerate_E1(
    x: PrimitiveVector, params: TreeParams, limit: int | None = None
) -> list[Witness]:
    """E₁(x) line by line, each line by increasing height.

    With *limit*, stop after that many points.
    """
    found: list[Witness] = []
    for line in _lines(x, params):
        for k in range(line.kmin, line.kmax + 1):
            found.append(line.witness(x, k))
            if limit is not None and len(found) >= limit:
                return found
    if not found:
        raise HeightTooSmall(f"E₁({x}) is empty")
    return found


def in_E1(x: PrimitiveVector, y: PrimitiveVector, params: TreeParams) -> bool:
    L = farey_lattice(x)
    alpha = project_along(x, y.as_tuple())
    try:
        s, t = basis_coordinates(L, alpha)
    except ValueError:
        return False
    if t != 1 or s * s * L.lam1_sq > L.lam2_sq:
        return False
    low = params.y_window(alpha.norm_sq, x.q)
    return low <= y.q and y.q <= 2 * low


def count_E1(
    x: PrimitiveVector,
    params: TreeParams,
    limit: int = D1_AREA_ESTIMATE_LIMIT,
) -> Cardinality:
    """card E₁(x), exact while there are at most *limit* lines."""
    _check_height(x, params)
    L = farey_lattice(x)
    bound = _m_bound(L)
    return _sampled_sum(
        -bound, bound, lambda m: len(_line(x, L, m, params)), limit
    )


def select_witnesses(
    x: PrimitiveVector, params: TreeParams, count: int | None = None
) -> list[Witness]:
    """Lowest points of E₁(x), taken round-robin over its first lines."""
    count = count or params.witnesses
    nonempty = (line for line in _lines(x, params) if len(line))
    lines = list(itertools.islice(nonempty, count))
    picked: list[Witness] = []
    for step in itertools.count():
        if len(picked) >= count or all(step >= len(l) for l in lines):
            break
        for line in lines:
            if step < len(line) and len(picked) < count:
                picked.append(line.witness(x, line.kmin + step))
    if not picked:
        raise HeightTooSmall(f"E₁({x}) is empty")
    return picked


# D₁(y)


@dataclass(frozen=True, slots=True)
class _Plane:
    """Z³ ∩ H_y = Z·y′ + Z·y with the D₁ height window [lo, hi]."""

    y: PrimitiveVector
    yp: IntVector3
    lam1_sq: Fraction
    lo: int
    hi: int
    c1: Fraction

    @property
    def a_bound(self) -> int:
        return math.floor(self.c1 * self.hi / self.y.q)

    def zmin(self, a: int) -> int:
        # |a|·λ₁(y)/|z| ≤ c1·λ₁(y)/|y|
        near = math.ceil(Fraction(abs(a) * self.y.q) / self.c1)
        return max(self.lo, self.y.q, near)

    def k_range(self, a: int) -> tuple[int, int]:
        n, q = self.yp[2], self.y.q
        return _ceil_div(self.zmin(a) - a * n, q), (self.hi - a * n) // q

    def point(self, a: int, k: int) -> PrimitiveVector:
        yp, y = self.yp, self.y
        return PrimitiveVector(
            a * yp[0] + k * y.p1, a * yp[1] + k * y.p2, a * yp[2] + k * y.q
        )

    def coordinates(self, z: PrimitiveVector) -> tuple[int, int] | None:
        """(a, k) with z = a·y′ + k·y, None off the lattice plane."""
        u, v, w = self.yp, self.y.as_tuple(), z.as_tuple()
        for i, j in ((0, 1), (0, 2), (1, 2)):
            det = u[i] * v[j] - u[j] * v[i]
            if det:
                a = Fraction(w[i] * v[j] - w[j] * v[i], det)
                k = Fraction(u[i] * w[j] - u[j] * w[i], det)
                break
        else:
            return None
        if a.denominator != 1 or k.denominator != 1:
            return None
        ai, ki = int(a), int(k)
        if any(ai * u[n] + ki * v[n] != w[n] for n in range(3)):
            return None
        return ai, ki


def _plane(y: PrimitiveVector, params: TreeParams) -> _Plane:
    L = farey_lattice(y)
    _, yp = sublattice_H(y, L)
    top = params.z_window(y.q)
    return _Plane(y, yp, L.lam1_sq, (top / 2).ceil(), top.floor(), params.c1)


def _prime_factors(n: int) -> list[int]:
    primes = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        primes.append(n)
    return primes


def _coprime_count(a: int, lo: int, hi: int) -> int:
    """#{k ∈ [lo, hi] : gcd(a, k) = 1}."""
    if lo > hi:
        return 0
    if a == 0:
        return sum(1 for k in (-1, 1) if lo <= k <= hi)
    total = 0
    primes = _prime_factors(abs(a))
    for r in range(len(primes) + 1):
        for combo in itertools.combinations(primes, r):
            d = math.prod(combo)
            total += (-1) ** r * (hi // d - (lo - 1) // d)
    return total


def count_D1(
    y: PrimitiveVector,
    params: TreeParams,
    limit: int = D1_AREA_ESTIMATE_LIMIT,
) -> Cardinality:
    """card D₁(y), exact while there are at most *limit* values of a.

    Past the limit, raw (a, k) counts are sampled and scaled by the
    density 6/π² of coprime pairs.
    """
    plane = _plane(y, params)
    A = plane.a_bound
    if 2 * A + 1 <= limit:
        return _sampled_sum(
            -A, A, lambda a: _coprime_count(a, *plane.k_range(a)), limit
        )

    def raw(a: int) -> int:
        klo, khi = plane.k_range(a)
        return max(0, khi - klo + 1)

    sampled = _sampled_sum(-A, A, raw, 0)
    return Cardinality(round(sampled.value * 6 / math.pi**2), False)


def enumerate_D1(
    y: PrimitiveVector, params: TreeParams, budget: int = AUDIT_BUDGET
) -> list[PrimitiveVector]:
    """D₁(y) sorted by (|z|, p1, p2)."""
    plane = _plane(y, params)
    A = plane.a_bound
    if 2 * A + 1 > budget:
        raise BudgetExceeded(f"D₁({y}) spans {2 * A + 1} values of a")
    ranges = {a: plane.k_range(a) for a in range(-A, A + 1)}
    candidates = sum(max(0, hi - lo + 1) for lo, hi in ranges.values())
    if candidates > budget:
        raise BudgetExceeded(f"D₁({y}) has {candidates} candidates")
    points = [
        plane.point(a, k)
        for a, (lo, hi) in ranges.items()
        for k in range(lo, hi + 1)
        if math.gcd(a, k) == 1
    ]
    if not points:
        raise HeightTooSmall(f"D₁({y}) is empty")
    return sorted(points, key=_height_order)


def in_D1(y: PrimitiveVector, z: PrimitiveVector, params: TreeParams) -> bool:
    plane = _plane(y, params)
    if not member_H(y, z) or plane.coordinates(z) is None:
        return False
    if not max(plane.lo, y.q) <= z.q <= plane.hi:
        return False
    d_sq = point_distance_sq(y.point, z.point)
    return d_sq * y.q * y.q <= params.c1**2 * plane.lam1_sq


def _first_child(plane: _Plane, a: int) -> PrimitiveVector | None:
    lo, hi = plane.k_range(a)
    for k in range(lo, hi + 1):
        if math.gcd(a, k) == 1:
            return plane.point(a, k)
    return None


# σ(x)

Edge = tuple[Witness, PrimitiveVector]


def select_children(
    x: PrimitiveVector, params: TreeParams, cap: int | None = None
) -> list[Edge]:
    """At most *cap* points of σ(x), two per witness.

    Witnesses come round-robin over the lines of E₁(x). Writing
    z = a·y′ + k·y, each witness gives the lowest admissible z with a = +1
    and with a = −1, one on each side of ŷ. The result is sorted by
    (|z|, p1, p2).
    """
    cap = cap or params.cap
    picks: list[Edge] = []
    for w in select_witnesses(x, params, (cap + 1) // 2):
        plane = _plane(w.y, params)
        for a in (1, -1):
            z = _first_child(plane, a)
            if z is not None:
                picks.append((w, z))
    picks = picks[:cap]
    if not picks:
        raise HeightTooSmall(f"σ({x}) has no point near its first witnesses")
    return sorted(picks, key=lambda p: _height_order(p[1]))


def sigma(
    x: PrimitiveVector, params: TreeParams, budget: int = AUDIT_BUDGET
) -> list[Edge]:
    """All of σ(x), refusing once more than *budget* points are due."""
    e1 = count_E1(x, params)
    if not e1.exact or e1.value > budget:
        raise BudgetExceeded(f"E₁({x}) has about {e1.value} points")
    edges: list[Edge] = []
    for w in enumerate_E1(x, params):
        remaining = budget - len(edges)
        edges.extend((w, z) for z in enumerate_D1(w.y, params, remaining))
    return sorted(edges, key=lambda p: _height_order(p[1]))


# Calibration


def _pairs(items: Sequence[Any]) -> Iterator[tuple[Any, Any]]:
    return itertools.combinations(items, 2)


def _least(values: Iterable[CertifiedReal]) -> Fraction:
    """Positive rational lower bound of the smallest value."""
    try:
        return min(v.positive().lower for v in values)
    except DomainError as e:
        raise HeightTooSmall(f"calibration bound is not positive: {e}") from e


def _greatest(values: Iterable[CertifiedReal]) -> Fraction:
    """Rational upper bound of the largest value."""
    return max(v.upper for v in values)


def calibrate(root: PrimitiveVector, params: TreeParams) -> TreeParams:
    """Fix c1…c4 from the root and its capped children.

    Each constant is a power of two chosen so that every inequality the
    verifier will ask of the first generation holds with room to spare.
    """
    _check_height(root, params)
    rp = params.packing_exponent
    r0 = params.exps.r0

    # c1 keeps the D₁ discs of distinct witnesses apart.
    first = enumerate_E1(root, params, max(2, 2 * params.witnesses))
    ys = [w.y for w in first]
    c1 = params.c1
    if len(ys) >= 2:
        rho = _least(_dist(a.point, b.point) for a, b in _pairs(ys))
        widest = _greatest(_lambda1_over_height(y) for y in ys)
        c1 = min(Fraction(1, 4), dyadic_floor(rho / (4 * widest)))
    params = replace(params, c1=c1)
    edges = select_children(root, params)
    zs = [z for _, z in edges]

    def r0_of(v: PrimitiveVector) -> CertifiedReal:
        return CertifiedReal.power(v.q, r0)

    def rp_of(v: PrimitiveVector) -> CertifiedReal:
        return CertifiedReal.power(v.q, rp)

    upper = [_legendre_radius(root) / r0_of(root)]
    lower = []
    for w, z in edges:
        y = w.y
        slack = _lambda1_over_height(y) / 2 - _dist(y.point, z.point)
        upper.append(slack / r0_of(z))
        upper.append(_legendre_radius(z) / r0_of(z))
        reach = _dist(root.point, y.point) + 2 * _lambda1_over_height(y)
        lower.append(reach / r0_of(root))
    for a, b in _pairs(zs):
        upper.append(_dist(a.point, b.point) / (r0_of(a) + r0_of(b)))
    c2 = dyadic_floor(_least(upper)) * CALIBRATION_SAFETY
    if lower and c2 <= _greatest(lower):
        raise HeightTooSmall(
            f"no ball scale fits the children of {root}; raise |x|"
        )

    c3 = params.c3
    r2 = CertifiedReal.power(root.q, params.exps.r2)
    same_witness = [
        _dist(a.point, b.point) / r2
        for (wa, a), (wb, b) in _pairs(edges)
        if wa.y == wb.y
    ]
    if same_witness:
        c3 = dyadic_floor(_least(same_witness)) * CALIBRATION_SAFETY

    floor_c4 = [
        c2 * r0_of(v) / (PACKING_K * rp_of(v)) for v in (root, *zs)
    ]
    floor_c4 += [
        _dist(root.point, z.point) / (rp_of(root) - rp_of(z)) for z in zs
    ]
    low = _greatest(floor_c4)
    ceilings = [
        _dist(a.point, b.point) / (rp_of(a) + rp_of(b)) for a, b in _pairs(zs)
    ]
    if ceilings:
        high = _least(ceilings)
        c4 = dyadic_floor(CertifiedReal.sqrt(low * high))
        if not low < c4 < high:
            raise HeightTooSmall(f"no packing scale fits {root}; raise |x|")
    else:
        c4 = 4 * dyadic_floor(low)
    logger.info("calibrated c1=%s c2=%s c3=%s c4=%s", c1, c2, c3, c4)
    return params.frozen(c1=c1, c2=c2, c3=c3, c4=c4)


# Verification


def _band(
    name: str,
    value: Callable[[], CertifiedReal],
    center: Callable[[], CertifiedReal],
    params: TreeParams,
    exempt: bool,
) -> Check:
    """center/band ≤ value ≤ center·band, skipped near the root."""
    if exempt:
        return Check(name, True, structural=False, exempt=True)
    v, c = value(), center()
    ok = c / params.band <= v and v <= c * params.band
    detail = f"{v.to_decimal(6)} vs {c.to_decimal(6)}"
    return Check(name, ok, structural=False, detail=detail)


def verify_node(
    node: TreeNode, params: TreeParams, parent: TreeNode | None = None
) -> NodeReport:
    """Checks on node alone, plus the edge checks when *parent* is given."""
    x = node.x
    L = farey_lattice(x)
    mu, b = params.mu, params.b
    radius = params.ball_radius(x.q)
    bootstrap = node.depth == 0
    checks = [
        Check("legendre", radius < _legendre_radius(x)),
        Check(
            "packing_ball", radius < PACKING_K * params.packing_radius(x.q)
        ),
        Check("q_mu", in_Q_mu(x, mu, L), exempt=bootstrap),
        _band(
            "lambda1",
            L.lambda1,
            lambda: CertifiedReal.power(x.q, -(mu + b) / (1 + b))
            / BAND_SCALE,
            params,
            bootstrap,
        ),
        _band(
            "lambda2",
            L.lambda2,
            lambda: BAND_SCALE
            * CertifiedReal.power(x.q, (mu - 1) / (1 + b)),
            params,
            bootstrap,
        ),
    ]
    if parent is not None:
        checks.extend(_edge_checks(parent, node, params))
    return NodeReport(node.id, tuple(checks))


def _edge_checks(
    parent: TreeNode, node: TreeNode, params: TreeParams
) -> list[Check]:
    if node.witness is None or node.parent != parent.id:
        return [Check("witness_in_E1", False, detail="no witness")]
    x, y, z = parent.x, node.witness.y, node.x
    e = params.exps
    c0 = params.c0
    bootstrap = parent.depth == 0
    inner = _lambda1_over_height(y) / 2
    outer = 2 * _lambda1_over_height(y)
    return [
        Check("witness_in_E1", in_E1(x, y, params)),
        Check("child_in_D1", in_D1(y, z, params)),
        Check(
            "nested_inner",
            _inside(z.point, params.ball_radius(z.q), y.point, inner),
        ),
        Check(
            "nested_outer",
            _inside(y.point, outer, x.point, params.ball_radius(x.q)),
        ),
        Check(
            "packing_nested",
            _inside(
                z.point,
                params.packing_radius(z.q),
                x.point,
                params.packing_radius(x.q),
            ),
        ),
        _band(
            "lambda1_y",
            farey_lattice(y).lambda1,
            lambda: CertifiedReal.power(y.q, -params.mu) / BAND_SCALE,
            params,
            False,
        ),
        _band(
            "height_y",
            lambda: CertifiedReal.exact(y.q),
            lambda: c0 * c0 * CertifiedReal.power(x.q, e.e_y),
            params,
            bootstrap,
        ),
        _band(
            "distance_xy",
            lambda: _dist(x.point, y.point),
            lambda: BAND_SCALE / (c0 * c0) * CertifiedReal.power(x.q, e.r0),
            params,
            bootstrap,
        ),
    ]


def verify_edge(
    parent: TreeNode, child: TreeNode, params: TreeParams
) -> NodeReport:
    return NodeReport(child.id, tuple(_edge_checks(parent, child, params)))


def sibling_checks(
    x: PrimitiveVector, edges: Sequence[Edge], params: TreeParams
) -> tuple[Check, ...]:
    """Disjointness and separation among the children of x."""
    zs = [z for _, z in edges]
    disjoint = all(
        _apart(
            a.point,
            params.ball_radius(a.q),
            b.point,
            params.ball_radius(b.q),
        )
        for a, b in _pairs(zs)
    )
    packing = all(
        _apart(
            a.point,
            params.packing_radius(a.q),
            b.point,
            params.packing_radius(b.q),
        )
        for a, b in _pairs(zs)
    )
    same_witness = [
        (w.y, a, b) for (w, a), (v, b) in _pairs(edges) if w.y == v.y
    ]
    # distinct points of D₁(y) are λ₁(y)/|y|^{1+2b} apart, up to 1/2
    d1_apart = all(
        _dist(a.point, b.point)
        >= _lambda1_over_height(y)
        / (2 * CertifiedReal.power(y.q, 2 * params.b))
        for y, a, b in same_witness
    )
    spread = params.separation(x.q)
    separated = all(
        _dist(a.point, b.point) >= spread for _, a, b in same_witness
    )
    return (
        Check("disjoint", disjoint),
        Check("packing_disjoint", packing),
        Check("d1_separation", d1_apart),
        Check("r2_separation", separated, structural=False),
    )


def _require(report: NodeReport, what: str) -> None:
    failed = [
        c.name
        for c in report.checks
        if c.structural and not (c.ok or c.exempt)
    ]
    if failed:
        raise HeightTooSmall(f"{what} fails {', '.join(failed)}")


# Trees


@dataclass
class CantorTree(BallTree):
    """A capped, verified finite part of the Cantor tree of a root."""

    params: TreeParams
    nodes: list[TreeNode]
    reports: dict[NodeId, NodeReport] = field(default_factory=dict)
    siblings: dict[NodeId, tuple[Check, ...]] = field(default_factory=dict)
    _children: dict[NodeId, list[NodeId]] = field(
        init=False, repr=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        for index, node in enumerate(self.nodes):
            if node.id != index:
                raise ValueError(f"node {index} carries id {node.id}")
            self._children[node.id] = []
            if node.parent is not None:
                if not 0 <= node.parent < index:
                    raise ValueError(f"node {index} has parent {node.parent}")
                self._children[node.parent].append(node.id)

    def node(self, node: NodeId) -> TreeNode:
        return self.nodes[node]

    def children_of(self, node: NodeId) -> list[NodeId]:
        return self._children[node]

    def parent_of(self, node: NodeId) -> NodeId | None:
        return self.nodes[node].parent

    def center(self, node: NodeId) -> RationalPoint:
        return self.nodes[node].x.point

    def radius(self, node: NodeId) -> CertifiedReal:
        return self.params.ball_radius(self.nodes[node].x.q)

    def packing_radius(self, node: NodeId) -> CertifiedReal:
        return self.params.packing_radius(self.nodes[node].x.q)

    @property
    def complete(self) -> bool:
        return False

    def path(self, node: NodeId) -> list[TreeNode]:
        return [self.nodes[i] for i in self.ancestry(node)]

    def extract(self, node: NodeId) -> TargetPoint:
        return extract_point(self.path(node), self.params)

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.as_dict(),
            "nodes": [_node_as_dict(n) for n in self.nodes],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        params = TreeParams.from_dict(data["params"])
        return cls(params, [_node_from_dict(d) for d in data["nodes"]])


def _vector_as_list(v: PrimitiveVector) -> list[str]:
    return [str(c) for c in v.as_tuple()]


def _vector_from_list(items: Sequence[str]) -> PrimitiveVector:
    p1, p2, q = (int(s) for s in items)
    return PrimitiveVector(p1, p2, q)


def _node_as_dict(node: TreeNode) -> dict[str, Any]:
    w = node.witness
    return {
        "id": node.id,
        "parent": node.parent,
        "depth": node.depth,
        "x": _vector_as_list(node.x),
        "witness": (
            None
            if w is None
            else {"y": _vector_as_list(w.y), "m": str(w.m), "k": str(w.k)}
        ),
    }


def _node_from_dict(data: dict[str, Any]) -> TreeNode:
    w = data.get("witness")
    witness = (
        None
        if w is None
        else Witness(_vector_from_list(w["y"]), int(w["m"]), int(w["k"]))
    )
    parent = data.get("parent")
    return TreeNode(
        NodeId(int(data["id"])),
        _vector_from_list(data["x"]),
        int(data["depth"]),
        None if parent is None else NodeId(int(parent)),
        witness,
    )


Expansion = tuple[list[tuple[Edge, tuple[Check, ...]]], tuple[Check, ...]]


def _expand(job: tuple[TreeNode, TreeParams]) -> Expansion:
    parent, params = job
    edges = select_children(parent.x, params)
    verified = []
    for w, z in edges:
        child = TreeNode(NodeId(-1), z, parent.depth + 1, parent.id, w)
        verified.append(((w, z), verify_node(child, params, parent).checks))
    return verified, sibling_checks(parent.x, edges, params)


def _run(
    fn: Callable[[Any], Expansion], jobs: list[Any], workers: int
) -> list[Expansion]:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def build_tree(
    root: PrimitiveVector,
    params: TreeParams,
    depth: int,
    budget: int = NODE_BUDGET,
    jobs: int = 1,
) -> CantorTree:
    """Capped Cantor tree of *root*, verified level by level.

    Raises HeightTooSmall as soon as a structural check fails.
    """
    if depth < 0:
        raise ValueError(f"Depth must be >= 0: {depth}")
    _check_height(root, params)
    if not params.calibrated:
        params = calibrate(root, params)
    top = TreeNode(NodeId(0), root, 0)
    tree = CantorTree(params, [top])
    tree.reports[top.id] = verify_node(top, params)
    _require(tree.reports[top.id], "root")
    frontier = [top]
    for level in range(depth):
        expansions = _run(_expand, [(n, params) for n in frontier], jobs)
        frontier = []
        for parent, (verified, siblings) in zip(
            [n for n in tree.nodes if n.depth == level], expansions
        ):
            tree.siblings[parent.id] = siblings
            _require(
                NodeReport(parent.id, siblings), f"children of {parent.id}"
            )
            for (w, z), checks in verified:
                child = TreeNode(
                    NodeId(len(tree.nodes)), z, level + 1, parent.id, w
                )
                report = NodeReport(child.id, checks)
                _require(report, f"node {child.id}")
                tree.nodes.append(child)
                tree._children[child.id] = []
                tree._children[parent.id].append(child.id)
                tree.reports[child.id] = report
                frontier.append(child)
        if len(tree.nodes) > budget:
            raise BudgetExceeded(f"tree passed {budget} nodes")
        logger.info(
            "level %d: %d nodes, heights up to %d digits",
            level + 1,
            len(frontier),
            len(str(max(n.x.q for n in frontier))),
        )
    return tree


@dataclass(frozen=True, slots=True)
class TreeReport:
    nodes: dict[NodeId, NodeReport]
    siblings: dict[NodeId, tuple[Check, ...]]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.nodes.values()) and all(
            c.ok for checks in self.siblings.values() for c in checks
            if c.structural
        )

    @property
    def bands_ok(self) -> bool:
        return all(r.bands_ok for r in self.nodes.values())

    def failures(self) -> list[tuple[NodeId, str]]:
        found = [
            (node, name)
            for node, report in self.nodes.items()
            for name in report.failures
        ]
        found += [
            (node, c.name)
            for node, checks in self.siblings.items()
            for c in checks
            if not c.ok and c.structural
        ]
        return found


def verify_tree(tree: CantorTree) -> TreeReport:
    """Re-run every node, edge and sibling check of a stored tree."""
    params = tree.params
    reports = {}
    siblings = {}
    for node in tree.nodes:
        parent = None if node.parent is None else tree.node(node.parent)
        reports[node.id] = verify_node(node, params, parent)
        kids = [tree.node(c) for c in tree.children_of(node.id)]
        if kids:
            edges = [(k.witness, k.x) for k in kids if k.witness is not None]
            siblings[node.id] = sibling_checks(node.x, edges, params)
    return TreeReport(reports, siblings)


def extract_point(path: Sequence[TreeNode], params: TreeParams) -> TargetPoint:
    """Enclosure of the point below a root-to-node path.

    Its center is the deepest x̂ and its radius bounds that node's ball,
    which lies inside the ball of every ancestor.
    """
    if not path:
        raise EmptyPath("cannot extract a point from an empty path")
    for parent, child in itertools.pairwise(path):
        if child.parent != parent.id:
            raise ValueError(f"node {child.id} is not a child of {parent.id}")
    deepest = path[-1]
    radius = params.ball_radius(deepest.x.q)
    for node in path[:-1]:
        outer = params.ball_radius(node.x.q)
        if not _inside(deepest.x.point, radius, node.x.point, outer):
            raise HeightTooSmall(f"B({deepest.x}) leaves B({node.x})")
    return TargetPoint.enclosure(deepest.x.point, radius.upper)


@dataclass(frozen=True, slots=True)
class CardinalityRow:
    height: int
    e1: Cardinality
    d1: Cardinality
    predicted: Fraction

    @property
    def sigma(self) -> int:
        return self.e1.value * self.d1.value

    @property
    def exact(self) -> bool:
        return self.e1.exact and self.d1.exact

    @property
    def exponent(self) -> float:
        """log card σ(x) / log |x|."""
        if self.sigma <= 0 or self.height <= 1:
            return math.nan
        return math.log(self.sigma) / math.log(self.height)


def cardinality_profile(
    xs: Iterable[PrimitiveVector], params: TreeParams
) -> list[CardinalityRow]:
    """card E₁(x), card D₁ at its first witness, and their product."""
    rows = []
    for x in xs:
        e1 = count_E1(x, params)
        (first,) = select_witnesses(x, params, 1)
        d1 = count_D1(first.y, params)
        rows.append(CardinalityRow(x.q, e1, d1, params.exps.n_x))
    return rows
