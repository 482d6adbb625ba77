"""Best simultaneous approximations of a point in the plane.

The record sequence x_n = (p_n, q_n) of a target θ lists every height q at
which dist(qθ, Z²) strictly improves. Two searches produce it:

- an incremental scan over q, exact in integers over the common denominator
  of θ, used up to ``scan_limit`` and as the oracle in tests;
- a tube search on the Farey lattice of the current record, which reaches the
  astronomically large heights of Cantor-tree points. After x_n, a later
  height v beats r_n exactly when α = π_{x_n}(y) lies within r_n of the ray
  {v·δ}, δ = θ − x̂_n, so the next record is found by enumerating lattice
  points of Λ_{x_n} in an ellipse around a segment of that ray.

Targets given as enclosures (a rational centre and a radius) are handled by
running the search on the centre and certifying that every decision holds
uniformly over the enclosure.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from collections.abc import Iterator
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from typing import Self

from bukzor_singular.certified import CertifiedReal
from bukzor_singular.certified import sqrt_le_power
from bukzor_singular.config import SCAN_LIMIT
from bukzor_singular.config import TUBE_BUDGET
from bukzor_singular.errors import BudgetExceeded
from bukzor_singular.errors import EnclosureTooCoarse
from bukzor_singular.errors import IrrationalityExhausted
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import farey_lattice
from bukzor_singular.rational_geometry import in_Q_mu
from bukzor_singular.rational_geometry import point_distance_sq
from bukzor_singular.types import Classification
from bukzor_singular.types import RationalPoint
from bukzor_singular.types import SearchStrategy

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class TargetPoint:
    """A target θ: an exact rational point or a certified enclosure."""

    center: RationalPoint
    radius: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError(f"Enclosure radius must be >= 0: {self.radius}")

    @classmethod
    def exact(cls, a: int | Fraction, b: int | Fraction) -> Self:
        return cls((Fraction(a), Fraction(b)))

    @classmethod
    def enclosure(
        cls, center: tuple[int | Fraction, int | Fraction], radius: Fraction
    ) -> Self:
        return cls((Fraction(center[0]), Fraction(center[1])), radius)

    @property
    def is_exact(self) -> bool:
        return self.radius == 0


@dataclass(frozen=True, slots=True)
class Record:
    """One best approximation x_n with r_n² = dist(q_n·θ, Z²)²."""

    x: PrimitiveVector
    rn_sq: Fraction

    @property
    def q(self) -> int:
        return self.x.q


@dataclass(frozen=True, slots=True)
class BestApproxSequence:
    theta: TargetPoint
    records: tuple[Record, ...]
    qmax: int
    terminal: bool = False

    @property
    def denominators(self) -> list[int]:
        return [r.q for r in self.records]

    def __len__(self) -> int:
        return len(self.records)


# Exact nearest-integer arithmetic over a common denominator


@dataclass(frozen=True, slots=True)
class _Grid:
    """θ = (A/D, B/D) with integer A, B."""

    A: int
    B: int
    D: int

    @classmethod
    def of(cls, center: RationalPoint) -> _Grid:
        a, b = center
        D = math.lcm(a.denominator, b.denominator)
        A = a.numerator * (D // a.denominator)
        B = b.numerator * (D // b.denominator)
        return cls(A, B, D)

    def nearest(self, q: int) -> tuple[int, int, int]:
        """(p1, p2, e1² + e2²) for the nearest point to qθ.

        Ties round down, which picks the lexicographically smallest p.
        """
        p1, e1 = self._round(q * self.A)
        p2, e2 = self._round(q * self.B)
        return p1, p2, e1 * e1 + e2 * e2

    def _round(self, t: int) -> tuple[int, int]:
        r = t % self.D
        if 2 * r <= self.D:
            return (t - r) // self.D, r
        return (t - r) // self.D + 1, self.D - r

    def record(self, q: int) -> Record:
        p1, p2, num = self.nearest(q)
        g = math.gcd(p1, p2, q)
        if g != 1:
            raise AssertionError(f"record at q={q} is not primitive")
        return Record(PrimitiveVector(p1, p2, q), Fraction(num, self.D**2))


def _sqrt_upper(v: Fraction) -> Fraction:
    r = math.isqrt(v.numerator * v.denominator)
    return Fraction(r + 1, v.denominator)


def _inflation(rn_sq: Fraction, spread: Fraction) -> Fraction:
    """Square of a rational upper bound of r_n + spread."""
    if spread == 0:
        return rn_sq
    return (CertifiedReal.sqrt(rn_sq).upper + spread) ** 2


def _scan(
    grid: _Grid, qmax: int, radius: Fraction
) -> tuple[list[Record], bool]:
    """Incremental record scan over q = 1..qmax."""
    records: list[Record] = []
    best = -1
    threshold = -1
    for q in range(1, qmax + 1):
        p1, p2, num = grid.nearest(q)
        if best < 0 or num < best:
            best = num
            x = PrimitiveVector(p1, p2, q)
            records.append(Record(x, Fraction(num, grid.D**2)))
            logger.debug("record q=%d r²=%s", q, records[-1].rn_sq)
            if num == 0:
                return records, True
            if radius:
                spread = (qmax + q) * radius
                bound = _inflation(records[-1].rn_sq, spread) * grid.D**2
                threshold = math.ceil(bound)
        elif num < threshold:
            raise EnclosureTooCoarse(
                f"height {q} may beat record {records[-1].x} inside the"
                f" enclosure of radius {radius}"
            )
    return records, False


# Tube search


@dataclass(slots=True)
class _Budget:
    limit: int
    spent: int = 0

    def charge(self, n: int = 1) -> None:
        self.spent += n
        if self.spent > self.limit:
            raise BudgetExceeded(
                f"tube search visited more than {self.limit} lattice points"
            )


@dataclass(frozen=True, slots=True)
class _Hit:
    v: int
    exact: bool


def _ellipse_points(
    q11: Fraction,
    q12: Fraction,
    q22: Fraction,
    c0: tuple[Fraction, Fraction],
    budget: _Budget,
) -> Iterator[tuple[int, int]]:
    """Integer c with Q(c − c0) ≤ 2, Q positive definite.

    The form is Lagrange-reduced first so the row ranges stay tight.
    """
    e1, e2 = (1, 0), (0, 1)

    def ip(a: tuple[int, int], b: tuple[int, int]) -> Fraction:
        row1 = q11 * b[0] + q12 * b[1]
        row2 = q12 * b[0] + q22 * b[1]
        return a[0] * row1 + a[1] * row2

    if ip(e1, e1) > ip(e2, e2):
        e1, e2 = e2, e1
    while True:
        k = round(ip(e1, e2) / ip(e1, e1))
        e2 = (e2[0] - k * e1[0], e2[1] - k * e1[1])
        if ip(e2, e2) >= ip(e1, e1):
            break
        e1, e2 = e2, e1
    r11, r12, r22 = ip(e1, e1), ip(e1, e2), ip(e2, e2)
    # c = d1·e1 + d2·e2; centre in the reduced coordinates
    det_u = e1[0] * e2[1] - e1[1] * e2[0]
    d0_1 = (c0[0] * e2[1] - c0[1] * e2[0]) / det_u
    d0_2 = (e1[0] * c0[1] - e1[1] * c0[0]) / det_u
    det_r = r11 * r22 - r12 * r12
    span2 = _sqrt_upper(2 * r11 / det_r)
    for d2 in range(math.floor(d0_2 - span2), math.ceil(d0_2 + span2) + 1):
        t2 = d2 - d0_2
        rest = 2 - det_r / r11 * t2 * t2
        if rest < 0:
            continue
        mid = d0_1 - r12 / r11 * t2
        span1 = _sqrt_upper(rest / r11)
        for d1 in range(math.floor(mid - span1), math.ceil(mid + span1) + 1):
            budget.charge()
            yield (
                d1 * e1[0] + d2 * e2[0],
                d1 * e1[1] + d2 * e2[1],
            )


def _tube_window(
    x: PrimitiveVector,
    delta: RationalPoint,
    rn_sq: Fraction,
    wide_sq: Fraction,
    lo: int,
    hi: int,
    budget: _Budget,
) -> list[_Hit]:
    """Heights v in (lo, hi] whose lattice point lies within the radius.

    ``wide_sq`` ≥ rn_sq is the squared search radius; hits that only beat
    the wide radius come back with ``exact=False``.
    """
    L = farey_lattice(x)
    q = x.q
    dd = delta[0] ** 2 + delta[1] ** 2
    u1, u2 = L.u1, L.u2
    s1 = (u1.a * delta[0] + u1.b * delta[1]) / dd
    s2 = (u2.a * delta[0] + u2.b * delta[1]) / dd
    w1 = delta[0] * u1.b - delta[1] * u1.a
    w2 = delta[0] * u2.b - delta[1] * u2.a
    if wide_sq == rn_sq:
        reach = Fraction(q)  # r_n/|δ| = q_n exactly
    else:
        reach = _sqrt_upper(wide_sq) / CertifiedReal.sqrt(dd).lower
    half = Fraction(hi - lo, 2) + reach
    mid = Fraction(hi + lo, 2)
    A, B = half * half, dd * wide_sq
    q11 = s1 * s1 / A + w1 * w1 / B
    q12 = s1 * s2 / A + w1 * w2 / B
    q22 = s2 * s2 / A + w2 * w2 / B
    det_m = s1 * w2 - s2 * w1
    c0 = (mid * w2 / det_m, -mid * w1 / det_m)

    hits: list[_Hit] = []
    for c1, c2 in _ellipse_points(q11, q12, q22, c0, budget):
        if c1 == 0 and c2 == 0:
            continue
        aa = c1 * u1.a + c2 * u2.a
        ab = c1 * u1.b + c2 * u2.b
        v_alpha = (c1 * L.w1[2] + c2 * L.w2[2]) % q
        ad = aa * delta[0] + ab * delta[1]
        na = aa * aa + ab * ab
        disc = ad * ad - dd * (na - wide_sq)
        if disc <= 0:
            continue
        root = _sqrt_upper(disc)
        v_from = max(lo + 1, math.floor((ad - root) / dd))
        v_to = min(hi, math.ceil((ad + root) / dd))
        v = v_from + (v_alpha - v_from) % q
        while v <= v_to:
            gap = dd * v * v - 2 * ad * v + na
            if gap < rn_sq:
                hits.append(_Hit(v, True))
                break
            if gap < wide_sq:
                hits.append(_Hit(v, False))
            v += q
    return hits


def _tube_next(
    grid: _Grid,
    record: Record,
    lo: int,
    qmax: int,
    radius: Fraction,
    budget: _Budget,
) -> Record | None:
    x = record.x
    cx, cy = Fraction(grid.A, grid.D), Fraction(grid.B, grid.D)
    xa, xb = x.point
    delta = (cx - xa, cy - xb)
    while lo < qmax:
        hi = min(2 * lo, qmax)
        wide_sq = _inflation(record.rn_sq, (hi + x.q) * radius)
        hits = _tube_window(x, delta, record.rn_sq, wide_sq, lo, hi, budget)
        exact = [h.v for h in hits if h.exact]
        loose = [h.v for h in hits if not h.exact]
        best = min(exact, default=None)
        if loose and (best is None or min(loose) < best):
            raise EnclosureTooCoarse(
                f"height {min(loose)} may beat record {x} inside the"
                f" enclosure of radius {radius}"
            )
        if best is not None:
            logger.debug("tube record after %s at height %d", x, best)
            return grid.record(best)
        lo = hi
    return None


def _certify(records: list[Record], theta: TargetPoint) -> None:
    """Every record decision holds for all points of the enclosure."""
    rho = theta.radius
    if rho == 0:
        return
    for prev, nxt in zip(records, records[1:]):
        left = CertifiedReal.sqrt(nxt.rn_sq) + nxt.q * rho
        right = CertifiedReal.sqrt(prev.rn_sq) - prev.q * rho
        if not left < right:
            raise EnclosureTooCoarse(
                f"records {prev.x} and {nxt.x} are not separated uniformly"
            )
    for rec in records:
        for coord, p in zip(theta.center, (rec.x.p1, rec.x.p2)):
            offset = abs(coord * rec.q - p)
            if 2 * (offset + rec.q * rho) >= 1:
                raise EnclosureTooCoarse(
                    f"nearest integer point at height {rec.q} is not unique"
                    " over the enclosure"
                )


def best_sequence(
    theta: TargetPoint,
    qmax: int,
    strategy: SearchStrategy = "auto",
    scan_limit: int = SCAN_LIMIT,
    budget: int = TUBE_BUDGET,
    strict: bool = False,
) -> BestApproxSequence:
    """Record sequence of θ up to height qmax.

    A rational θ ends with a record at distance 0; the result is then flagged
    ``terminal``, or IrrationalityExhausted is raised when ``strict``.
    """
    if qmax < 1:
        raise ValueError(f"qmax must be positive: {qmax}")
    grid = _Grid.of(theta.center)
    limit = {"scan": qmax, "tube": 1, "auto": min(qmax, scan_limit)}[strategy]
    limit = min(limit, qmax)
    records, terminal = _scan(grid, limit, theta.radius)
    if not terminal and limit < qmax:
        spent = _Budget(budget)
        lo = limit
        while True:
            nxt = _tube_next(grid, records[-1], lo, qmax, theta.radius, spent)
            if nxt is None:
                break
            records.append(nxt)
            lo = nxt.q
            if nxt.rn_sq == 0:
                terminal = True
                break
        logger.info(
            "tube search: %d records up to %d, %d lattice points",
            len(records),
            qmax,
            spent.spent,
        )
    _certify(records, theta)
    if terminal and strict:
        raise IrrationalityExhausted(
            f"θ = {theta.center} is rational with denominator"
            f" {records[-1].q} ≤ {qmax}"
        )
    return BestApproxSequence(theta, tuple(records), qmax, terminal)


def naive_best_sequence(theta: TargetPoint, qmax: int) -> BestApproxSequence:
    """Exhaustive oracle over q = 1..qmax by Fraction rounding."""
    a, b = theta.center
    records: list[Record] = []
    for q in range(1, qmax + 1):
        best: tuple[Fraction, int, int] | None = None
        for p1 in (math.floor(q * a), math.ceil(q * a)):
            for p2 in (math.floor(q * b), math.ceil(q * b)):
                d = (q * a - p1) ** 2 + (q * b - p2) ** 2
                if best is None or (d, p1, p2) < best:
                    best = (d, p1, p2)
        assert best is not None
        d, p1, p2 = best
        if not records or d < records[-1].rn_sq:
            records.append(Record(PrimitiveVector(p1, p2, q), d))
            if d == 0:
                return BestApproxSequence(theta, tuple(records), qmax, True)
    return BestApproxSequence(theta, tuple(records), qmax, False)


# Classification and verifiers


def legendre_classify(
    x: PrimitiveVector, theta: TargetPoint
) -> Classification:
    """Position of θ against the closed inner ball and the outer ball of x."""
    L = farey_lattice(x)
    d_sq = point_distance_sq(x.point, theta.center)
    inner_sq = L.lam1_sq / (4 * x.q**2)
    outer_sq = 4 * L.lam1_sq / x.q**2
    rho = theta.radius
    if rho == 0:
        if d_sq <= inner_sq:
            return "inner"
        if d_sq >= outer_sq:
            return "outer"
        return "between"
    d = CertifiedReal.sqrt(d_sq)
    inner = CertifiedReal.sqrt(inner_sq)
    outer = CertifiedReal.sqrt(outer_sq)
    d_max = d + rho
    d_min = d - rho
    if d_max <= inner:
        return "inner"
    if d_min >= outer:
        return "outer"
    if d_min > inner and d_max < outer:
        return "between"
    raise EnclosureTooCoarse(
        f"enclosure of radius {rho} straddles a Legendre ball of {x}"
    )


@dataclass(frozen=True, slots=True)
class Bai3Report:
    checked: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_bai3(seq: BestApproxSequence) -> Bai3Report:
    """Consecutive-distance, tail-distance and comparability checks."""
    recs = seq.records
    violations: list[str] = []
    checked = 0
    lam1 = [farey_lattice(r.x).lam1_sq for r in recs]
    for n in range(len(recs) - 1):
        qn = recs[n].q
        d_sq = point_distance_sq(recs[n].x.point, recs[n + 1].x.point)
        checked += 1
        if not d_sq * qn * qn < 16 * lam1[n + 1]:
            violations.append(f"(i) n={n}: consecutive distance too large")
        for k in range(n + 1, len(recs)):
            d_sq = point_distance_sq(recs[n].x.point, recs[k].x.point)
            checked += 1
            if not d_sq * qn * qn < 16 * lam1[n]:
                violations.append(f"(ii) n={n}, n+k={k}: tail distance")
    a, b = seq.theta.center
    for n in range(1, len(recs)):
        xa, xb = recs[n].x.point
        for m in range(n):
            pm = recs[m].x
            at_theta = (pm.q * a - pm.p1) ** 2 + (pm.q * b - pm.p2) ** 2
            at_xn = (pm.q * xa - pm.p1) ** 2 + (pm.q * xb - pm.p2) ** 2
            checked += 1
            if not (4 * at_theta >= at_xn and at_theta <= 4 * at_xn):
                violations.append(f"(iii) n={n}, m={m}: not comparable")
    return Bai3Report(checked, violations)


def uniform_distance(seq: BestApproxSequence, Q: int) -> Fraction:
    """D(Q)² = min_{q ≤ Q} dist(qθ, Z²)²."""
    if Q < 1:
        raise ValueError(f"Q must be positive: {Q}")
    best = seq.records[0].rn_sq
    for rec in seq.records:
        if rec.q > Q:
            break
        best = rec.rn_sq
    return best


@dataclass(frozen=True, slots=True)
class ProfileRow:
    Q: int
    dist_sq: Fraction
    estimate: CertifiedReal | None
    infinite: bool = False


@dataclass(frozen=True, slots=True)
class ExponentProfile:
    rows: list[ProfileRow]
    tail_infimum: CertifiedReal | None
    tail_infinite: bool


def _exponent(dist_sq: Fraction, Q: int) -> CertifiedReal:
    """−log D / log Q with D² = dist_sq."""
    return -CertifiedReal.log(dist_sq) / (2 * CertifiedReal.log(Q))


def exponent_profile(
    seq: BestApproxSequence, grid: Iterable[int]
) -> ExponentProfile:
    """Uniform-exponent estimates −log D(Q)/log Q on a grid of heights.

    The tail is the upper half of the grid by height.
    """
    rows: list[ProfileRow] = []
    for Q in grid:
        if not 1 <= Q <= seq.qmax:
            raise ValueError(f"Q={Q} outside [1, {seq.qmax}]")
        d_sq = uniform_distance(seq, Q)
        if d_sq == 0:
            rows.append(ProfileRow(Q, d_sq, None, infinite=True))
        elif Q == 1:
            rows.append(ProfileRow(Q, d_sq, None))
        else:
            rows.append(ProfileRow(Q, d_sq, _exponent(d_sq, Q)))
    tail_rows = sorted(rows, key=lambda r: r.Q)[len(rows) // 2 :]
    finite = [r.estimate for r in tail_rows if r.estimate is not None]
    tail = None
    if finite:
        tail = CertifiedReal(
            min(e.lower for e in finite), min(e.upper for e in finite)
        )
    infinite = not finite and any(r.infinite for r in tail_rows)
    return ExponentProfile(rows, tail, infinite)


def ordinary_exponent_profile(
    seq: BestApproxSequence,
) -> list[tuple[int, CertifiedReal]]:
    """−log r_n / log q_{n+1} along the records."""
    out: list[tuple[int, CertifiedReal]] = []
    for rec, nxt in zip(seq.records, seq.records[1:]):
        if rec.rn_sq == 0:
            break
        out.append((rec.q, _exponent(rec.rn_sq, nxt.q)))
    return out


@dataclass(frozen=True, slots=True)
class WitnessRow:
    n: int
    q: int
    lambda1_ok: bool
    middle_sq: Fraction
    lower_ok: bool
    upper_ok: bool
    comparable_ok: bool


@dataclass(frozen=True, slots=True)
class WitnessReport:
    mu: Fraction
    rows: list[WitnessRow]
    degenerate: bool

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.lambda1_ok for r in self.rows)

    @property
    def failures(self) -> list[int]:
        return [r.n for r in self.rows if not r.lambda1_ok]


def singular_witness(
    seq: BestApproxSequence,
    mu: Fraction,
    n_range: range | None = None,
) -> WitnessReport:
    """Check λ₁(x_n) ≤ |x_n|^{−μ} with the middle-quantity sandwich.

    The middle quantity is m_n = ‖q_{n−1}x̂_n − p_{n−1}‖; the report also
    checks r_{n−1} ≤ 2·m_n, the comparability used for the converse.
    """
    recs = seq.records
    n_range = n_range or range(1, len(recs))
    rows: list[WitnessRow] = []
    for n in n_range:
        if not 1 <= n < len(recs):
            raise ValueError(
                f"n={n} outside the record range 1..{len(recs) - 1}"
            )
        x, prev = recs[n].x, recs[n - 1]
        L = farey_lattice(x)
        xa, xb = x.point
        pq = prev.x
        m_sq = (pq.q * xa - pq.p1) ** 2 + (pq.q * xb - pq.p2) ** 2
        rows.append(
            WitnessRow(
                n=n,
                q=x.q,
                lambda1_ok=in_Q_mu(x, mu, L),
                middle_sq=m_sq,
                lower_ok=L.lam1_sq <= m_sq,
                upper_ok=sqrt_le_power(m_sq, x.q, -mu),
                comparable_ok=prev.rn_sq <= 4 * m_sq,
            )
        )
    return WitnessReport(mu, rows, degenerate=seq.terminal)


@dataclass(frozen=True, slots=True)
class DecayReport:
    mu: Fraction
    checked: int
    violations: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def uniform_decay_check(
    seq: BestApproxSequence, mu: Fraction, qmin: int, qmax: int
) -> DecayReport:
    """D(Q) ≤ Q^{−μ} for every integer Q in [qmin, qmax].

    D is constant between records and Q^{−μ} decreases, so only the right
    end of each step needs checking.
    """
    recs = seq.records
    violations: list[int] = []
    checked = 0
    for i, rec in enumerate(recs):
        right = recs[i + 1].q - 1 if i + 1 < len(recs) else qmax
        left = max(rec.q, qmin)
        right = min(right, qmax)
        if left > right:
            continue
        checked += 1
        if rec.rn_sq and not sqrt_le_power(rec.rn_sq, right, -mu):
            violations.append(right)
    return DecayReport(mu, checked, violations)


def continued_fraction_denominators(c: Fraction, qmax: int) -> list[int]:
    """Distinct convergent denominators of c up to qmax."""
    out: list[int] = []
    q_prev, q = 0, 1
    rest = c
    while q <= qmax:
        if not out or out[-1] != q:
            out.append(q)
        a = math.floor(rest)
        frac = rest - a
        if frac == 0:
            break
        rest = 1 / frac
        a = math.floor(rest)
        q_prev, q = q, a * q + q_prev
    return out
