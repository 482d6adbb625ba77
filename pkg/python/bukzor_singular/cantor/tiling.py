"""Distorted tiling of B(x) by the trapezoids T(m, a).

For y ∈ E₁(x) on the line α_m with a = ⌊|y|/|x|⌋, the cell T(m, a) has
corners c(m, a), c(m+1, a), c(m+1, a+1), c(m, a+1) where
c(m, a) = x̂ + α_m/(a·|x|). Its sides P0P1 and P3P2 are parallel to u1,
and ŷ sits on the side P0P3 because ŷ − x̂ = α_m/|y|.

Widths along u1 are about λ₁(x)/|y| and heights across it about
1/(λ₁(x)·|y|²), so with Y the window of the line α₀ = u2 every cell is
comparable to an H × V rectangle, H = λ₁(x)/(3Y) and V = |x|·λ₂(x)/(8Y²).
At a node whose minima sit in their bands, H and V agree with |x|^h and
|x|^v up to bounded factors; both pairs are kept.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from bukzor_singular.cantor.params import TreeParams
from bukzor_singular.cantor.tree import Check
from bukzor_singular.cantor.tree import enumerate_E1
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.config import C0_TILING
from bukzor_singular.config import TILING_LIMIT
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import Rational2Vector
from bukzor_singular.rational_geometry import farey_lattice
from bukzor_singular.rational_geometry import point_distance_sq
from bukzor_singular.types import RationalPoint

logger = logging.getLogger(__name__)

Quad = tuple[RationalPoint, RationalPoint, RationalPoint, RationalPoint]


@dataclass(frozen=True, slots=True)
class TilingCell:
    m: int
    a: int
    corners: Quad
    y: PrimitiveVector


@dataclass(frozen=True, slots=True)
class Tiling:
    x: PrimitiveVector
    cells: tuple[TilingCell, ...]
    H: CertifiedReal
    V: CertifiedReal
    truncated: bool
    x_h: CertifiedReal  # |x|^h
    x_v: CertifiedReal  # |x|^v


@dataclass(frozen=True, slots=True)
class TilingReport:
    checks: tuple[Check, ...]
    rho: CertifiedReal | None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]


def _corner(
    x: PrimitiveVector, alpha: Rational2Vector, a: int
) -> RationalPoint:
    xa, xb = x.point
    t = a * x.q
    return xa + alpha.a / t, xb + alpha.b / t


def build_tiling(
    x: PrimitiveVector, params: TreeParams, limit: int | None = TILING_LIMIT
) -> Tiling:
    """One cell per point of E₁(x), at most *limit* of them."""
    L = farey_lattice(x)
    witnesses = enumerate_E1(
        x, params, None if limit is None else limit + 1
    )
    truncated = limit is not None and len(witnesses) > limit
    if truncated:
        logger.warning("tiling of %s truncated to %d cells", x, limit)
        witnesses = witnesses[:limit]
    cells = []
    for w in witnesses:
        a = w.y.q // x.q
        here = L.u1 * w.m + L.u2
        there = here + L.u1
        corners = (
            _corner(x, here, a),
            _corner(x, there, a),
            _corner(x, there, a + 1),
            _corner(x, here, a + 1),
        )
        cells.append(TilingCell(w.m, a, corners, w.y))
    Y = params.y_window(L.lam2_sq, x.q)
    H = L.lambda1() / (3 * Y)
    V = x.q * L.lambda2() / (8 * Y * Y)
    e = params.exps
    return Tiling(
        x,
        tuple(cells),
        H,
        V,
        truncated,
        CertifiedReal.power(x.q, e.h),
        CertifiedReal.power(x.q, e.v),
    )


# Exact polygon arithmetic


def _cross(o: RationalPoint, a: RationalPoint, b: RationalPoint) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _area2(poly: Sequence[RationalPoint]) -> Fraction:
    """Twice the signed area."""
    n = len(poly)
    return sum(
        (
            poly[i][0] * poly[(i + 1) % n][1]
            - poly[(i + 1) % n][0] * poly[i][1]
            for i in range(n)
        ),
        Fraction(0),
    )


def _intersect(
    p: RationalPoint, q: RationalPoint, a: RationalPoint, b: RationalPoint
) -> RationalPoint:
    """Where segment pq crosses the line ab."""
    cp, cq = _cross(a, b, p), _cross(a, b, q)
    t = cp / (cp - cq)
    return p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])


def clip(
    subject: Sequence[RationalPoint], window: Sequence[RationalPoint]
) -> list[RationalPoint]:
    """Sutherland–Hodgman: subject ∩ window for a convex window."""
    sign = 1 if _area2(window) > 0 else -1
    out = list(subject)
    for a, b in zip(window, [*window[1:], window[0]]):
        if not out:
            break
        src, out = out, []
        for p, q in zip(src, [*src[1:], src[0]]):
            p_in = sign * _cross(a, b, p) >= 0
            q_in = sign * _cross(a, b, q) >= 0
            if p_in:
                out.append(p)
            if p_in != q_in:
                out.append(_intersect(p, q, a, b))
    return out


def overlap_area(a: Quad, b: Quad) -> Fraction:
    """Exact area of the intersection of two convex quadrilaterals."""
    return abs(_area2(clip(a, b))) / 2


def _bbox(quad: Quad) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    xs = [p[0] for p in quad]
    ys = [p[1] for p in quad]
    return min(xs), max(xs), min(ys), max(ys)


def overlapping_pairs(cells: Sequence[TilingCell]) -> list[tuple[int, int]]:
    """Index pairs of cells whose intersection has positive area."""
    boxes = [_bbox(c.corners) for c in cells]
    order = sorted(range(len(cells)), key=lambda i: boxes[i][0])
    found = []
    for n, i in enumerate(order):
        for j in order[n + 1 :]:
            if boxes[j][0] >= boxes[i][1]:
                break
            if boxes[j][2] >= boxes[i][3] or boxes[i][2] >= boxes[j][3]:
                continue
            if overlap_area(cells[i].corners, cells[j].corners) > 0:
                found.append((min(i, j), max(i, j)))
    return found


def closest_pair(points: Sequence[RationalPoint]) -> Fraction | None:
    """Smallest squared distance between two of the points, by sweep."""
    ordered = sorted(points)
    best: Fraction | None = None
    for i, p in enumerate(ordered):
        for q in ordered[i + 1 :]:
            dx = q[0] - p[0]
            if best is not None and dx * dx >= best:
                break
            d = point_distance_sq(p, q)
            if best is None or d < best:
                best = d
    return best


# Axioms


def _frame(
    x: PrimitiveVector, u1: Rational2Vector, p: RationalPoint
) -> tuple[Fraction, Fraction]:
    """(λ₁·t, λ₁·s) for p − x̂ in the orthonormal frame of u1."""
    v = Rational2Vector(p[0] - x.point[0], p[1] - x.point[1])
    return v.dot(u1), u1.det(v)


def _overlap(
    i: tuple[Fraction, Fraction], j: tuple[Fraction, Fraction]
) -> Fraction:
    return max(Fraction(0), min(i[1], j[1]) - max(i[0], j[0]))


def _span(*values: Fraction) -> tuple[Fraction, Fraction]:
    return min(values), max(values)


def _rectangles(
    x: PrimitiveVector, u1: Rational2Vector, cell: TilingCell
) -> tuple[list[tuple[Fraction, Fraction]], tuple[Fraction, Fraction]]:
    """Inner rectangle options and the outer box, scaled by λ₁(x).

    Inner options are the full-height rectangle and the two half-height
    ones against either parallel side.
    """
    (t0, s0), (t1, _), (t2, _), (t3, s3) = (
        _frame(x, u1, p) for p in cell.corners
    )
    near, far = _span(t0, t1), _span(t3, t2)
    mid = _span((t0 + t3) / 2, (t1 + t2) / 2)
    h = abs(s3 - s0)
    inner = [
        (_overlap(near, far), h),
        (_overlap(near, mid), h / 2),
        (_overlap(mid, far), h / 2),
    ]
    ts = (t0, t1, t2, t3)
    outer = (max(ts) - min(ts), h)
    return inner, outer


def _on_side(cell: TilingCell) -> bool:
    p0, _, _, p3 = cell.corners
    y = cell.y.point
    if _cross(p0, p3, y) != 0:
        return False
    side = (p3[0] - p0[0], p3[1] - p0[1])
    offset = (y[0] - p0[0]) * side[0] + (y[1] - p0[1]) * side[1]
    return 0 <= offset <= side[0] ** 2 + side[1] ** 2


def verify_tiling(
    tiling: Tiling, params: TreeParams, c0: Fraction = C0_TILING
) -> TilingReport:
    """The distorted-tiling axioms, ŷ placement and the ρ(x) band."""
    x = tiling.x
    L = farey_lattice(x)
    lam1 = L.lambda1()
    radius = params.ball_radius(x.q)
    H, V = tiling.H, tiling.V
    corners = [p for cell in tiling.cells for p in cell.corners]
    contained = all(
        CertifiedReal.sqrt(point_distance_sq(p, x.point)) < radius
        for p in corners
    )
    overlaps = overlapping_pairs(tiling.cells)
    inner_ok = outer_ok = True
    for cell in tiling.cells:
        inner, (width, height) = _rectangles(x, L.u1, cell)
        inner_ok = inner_ok and any(
            w / lam1 >= H / c0 and h / lam1 >= V / c0 for w, h in inner
        )
        outer_ok = (
            outer_ok and width / lam1 <= c0 * H and height / lam1 <= c0 * V
        )
    on_side = all(_on_side(cell) for cell in tiling.cells)
    rho_sq = closest_pair([cell.y.point for cell in tiling.cells])
    rho = None if rho_sq is None else CertifiedReal.sqrt(rho_sq)
    rho_ok = rho is None or (V / 16 <= rho and rho <= 16 * V)
    checks = (
        Check("corners_inside", contained),
        Check(
            "overlap",
            not overlaps,
            detail=", ".join(f"{i}/{j}" for i, j in overlaps[:8]),
        ),
        Check("inner_rectangle", inner_ok),
        Check("outer_rectangle", outer_ok),
        Check("y_on_side", on_side),
        Check("rho_band", rho_ok, structural=False),
    )
    return TilingReport(checks, rho)


def adjacent(a: TilingCell, b: TilingCell) -> bool:
    """Cells sharing a side: same line with consecutive a, or the reverse."""
    shared = set(a.corners) & set(b.corners)
    return len(shared) == 2
