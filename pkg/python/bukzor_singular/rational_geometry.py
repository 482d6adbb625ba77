"""Exact planar geometry of rational points.

A primitive integer vector x = (p1, p2, q) stands for the rational point
x̂ = (p1/q, p2/q). Its Farey lattice Λ_x = Z² + Z·x̂ is the image of Z³ under
the projection π_x(m, n) = m − n·x̂ along x. All lattice work is done in the
integer lattice q·Λ_x ⊂ Z² and divided by q at the end, so every length,
minimum and determinant here is an exact rational.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Self

from bukzor_singular.certified import CertifiedReal
from bukzor_singular.certified import sqrt_le_power
from bukzor_singular.errors import NotPrimitive
from bukzor_singular.errors import TieBreak
from bukzor_singular.errors import ZeroVector
from bukzor_singular.types import IntVector3
from bukzor_singular.types import RationalPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PrimitiveVector:
    """Lowest-terms integer data (p1, p2, q) of a rational point."""

    p1: int
    p2: int
    q: int

    def __post_init__(self) -> None:
        if self.q <= 0:
            raise ValueError(f"Height must be positive: q={self.q}")
        if math.gcd(self.p1, self.p2, self.q) != 1:
            raise NotPrimitive(
                f"Vector ({self.p1}, {self.p2}, {self.q}) is not primitive"
            )

    @classmethod
    def from_ints(cls, v: IntVector3) -> Self:
        return cls(*v)

    @property
    def height(self) -> int:
        return self.q

    @property
    def point(self) -> RationalPoint:
        return Fraction(self.p1, self.q), Fraction(self.p2, self.q)

    def as_tuple(self) -> IntVector3:
        return self.p1, self.p2, self.q

    def __str__(self) -> str:
        return f"({self.p1}, {self.p2}, {self.q})"


@dataclass(frozen=True, slots=True)
class Rational2Vector:
    """Exact vector in the plane."""

    a: Fraction
    b: Fraction

    @classmethod
    def of(cls, a: int | Fraction, b: int | Fraction) -> Self:
        return cls(Fraction(a), Fraction(b))

    @property
    def norm_sq(self) -> Fraction:
        return self.a * self.a + self.b * self.b

    def dot(self, other: Rational2Vector) -> Fraction:
        return self.a * other.a + self.b * other.b

    def det(self, other: Rational2Vector) -> Fraction:
        return self.a * other.b - self.b * other.a

    def __add__(self, other: Rational2Vector) -> Rational2Vector:
        return Rational2Vector(self.a + other.a, self.b + other.b)

    def __sub__(self, other: Rational2Vector) -> Rational2Vector:
        return Rational2Vector(self.a - other.a, self.b - other.b)

    def __mul__(self, k: int | Fraction) -> Rational2Vector:
        return Rational2Vector(self.a * k, self.b * k)

    __rmul__ = __mul__

    def __neg__(self) -> Rational2Vector:
        return Rational2Vector(-self.a, -self.b)

    def as_tuple(self) -> RationalPoint:
        return self.a, self.b


@dataclass(frozen=True, slots=True)
class FareyLattice:
    """Λ_x with a canonical Gauss-reduced basis and integer preimages."""

    owner: PrimitiveVector
    u1: Rational2Vector
    u2: Rational2Vector
    w1: IntVector3
    w2: IntVector3
    lam1_sq: Fraction
    lam2_sq: Fraction

    @property
    def covolume(self) -> Fraction:
        return abs(self.u1.det(self.u2))

    def lambda1(self) -> CertifiedReal:
        return CertifiedReal.sqrt(self.lam1_sq)

    def lambda2(self) -> CertifiedReal:
        return CertifiedReal.sqrt(self.lam2_sq)

    def normalized_minima(self) -> tuple[CertifiedReal, CertifiedReal]:
        """q^{1/2}·λ₁ and q^{1/2}·λ₂."""
        q = self.owner.q
        return (
            CertifiedReal.sqrt(q * self.lam1_sq),
            CertifiedReal.sqrt(q * self.lam2_sq),
        )

    def minkowski_ok(self) -> bool:
        q_sq = self.owner.q**2
        product = self.lam1_sq * self.lam2_sq
        return Fraction(1, q_sq) <= product <= Fraction(4, 3 * q_sq)

    def is_gauss_reduced(self) -> bool:
        return (
            self.lam1_sq <= self.lam2_sq
            and 2 * abs(self.u1.dot(self.u2)) <= self.lam1_sq
        )


def make_primitive(p1: int, p2: int, q: int) -> PrimitiveVector:
    """Lowest-terms representative with positive last coordinate."""
    g = math.gcd(p1, p2, q)
    if g == 0:
        raise ZeroVector("All coordinates are zero")
    if q == 0:
        raise ValueError(f"Point at infinity: ({p1}, {p2}, 0)")
    if q < 0:
        g = -g
    return PrimitiveVector(p1 // g, p2 // g, q // g)


def wedge_sq(x: PrimitiveVector, y: PrimitiveVector) -> int:
    """|x∧y|² = ‖p·v − u·q‖² for x = (p, q), y = (u, v)."""
    c1 = x.p1 * y.q - y.p1 * x.q
    c2 = x.p2 * y.q - y.p2 * x.q
    return c1 * c1 + c2 * c2


def wedge(x: PrimitiveVector, y: PrimitiveVector) -> CertifiedReal:
    return CertifiedReal.sqrt(wedge_sq(x, y))


def distance_sq(x: PrimitiveVector, y: PrimitiveVector) -> Fraction:
    """d(x̂, ŷ)², equal to |x∧y|²/(|x|²|y|²)."""
    return Fraction(wedge_sq(x, y), (x.q * y.q) ** 2)


def point_distance_sq(a: RationalPoint, b: RationalPoint) -> Fraction:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def project_along(x: PrimitiveVector, z: IntVector3) -> Rational2Vector:
    """π_x(m, n) = m − n·x̂."""
    m1, m2, n = z
    return Rational2Vector(
        m1 - Fraction(n * x.p1, x.q), m2 - Fraction(n * x.p2, x.q)
    )


# Integer lattice q·Λ_x: rows are (vector, preimage)
_Row = tuple[int, int, IntVector3]


def _axpy(k: int, a: _Row, b: _Row) -> _Row:
    """b + k·a on vector and preimage."""
    wa, wb = a[2], b[2]
    return (
        b[0] + k * a[0],
        b[1] + k * a[1],
        (wb[0] + k * wa[0], wb[1] + k * wa[1], wb[2] + k * wa[2]),
    )


def _neg(a: _Row) -> _Row:
    w = a[2]
    return -a[0], -a[1], (-w[0], -w[1], -w[2])


def _eliminate(rows: list[_Row], col: int) -> tuple[_Row | None, list[_Row]]:
    """Euclid on one coordinate: one pivot row plus rows zero there."""
    rows = [r for r in rows if r[0] or r[1]]
    while sum(1 for r in rows if r[col]) > 1:
        pivot = min((r for r in rows if r[col]), key=lambda r: abs(r[col]))
        rows = [
            (
                _axpy(-(r[col] // pivot[col]), pivot, r)
                if r is not pivot and r[col]
                else r
            )
            for r in rows
        ]
        rows = [r for r in rows if r[0] or r[1]]
    pivots = [r for r in rows if r[col]]
    rest = [r for r in rows if not r[col]]
    return (pivots[0] if pivots else None), rest


def _norm(r: _Row) -> int:
    return r[0] * r[0] + r[1] * r[1]


def _dot(a: _Row, b: _Row) -> int:
    return a[0] * b[0] + a[1] * b[1]


def _det(a: _Row, b: _Row) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _gauss(b1: _Row, b2: _Row) -> tuple[_Row, _Row]:
    if _norm(b1) > _norm(b2):
        b1, b2 = b2, b1
    while True:
        k = round(Fraction(_dot(b1, b2), _norm(b1)))
        b2 = _axpy(-k, b1, b2)
        if _norm(b2) >= _norm(b1):
            return b1, b2
        b1, b2 = b2, b1


def _canonical(b1: _Row, b2: _Row) -> tuple[_Row, _Row]:
    """Deterministic shortest vector and reduced partner."""
    n1 = _norm(b1)
    candidates = [b1, _neg(b1)]
    if _norm(b2) == n1:
        candidates += [b2, _neg(b2)]
        for s in (1, -1):
            c = _axpy(s, b2, b1)
            if _norm(c) == n1:
                candidates += [c, _neg(c)]
    u = max(candidates, key=lambda r: (r[0] * r[0], r[0], r[1]))
    partner = b2 if u[:2] in (b1[:2], _neg(b1)[:2]) else b1
    partner = _axpy(-round(Fraction(_dot(u, partner), n1)), u, partner)
    if _det(u, partner) < 0:
        partner = _neg(partner)
    if 2 * _dot(u, partner) == -n1:
        partner = _axpy(1, u, partner)
    return u, partner


def _reduce_mod(w: IntVector3, x: PrimitiveVector) -> IntVector3:
    """Shift w along x so its last coordinate lies in [0, q)."""
    k = -(w[2] // x.q)
    return w[0] + k * x.p1, w[1] + k * x.p2, w[2] + k * x.q


@functools.lru_cache(maxsize=4096)
def farey_lattice(x: PrimitiveVector) -> FareyLattice:
    """Canonical Gauss-reduced basis of Λ_x."""
    q = x.q
    rows: list[_Row] = [
        (q, 0, (1, 0, 0)),
        (0, q, (0, 1, 0)),
        (x.p1, x.p2, (0, 0, -1)),
    ]
    first, rest = _eliminate(rows, 0)
    second, _ = _eliminate(rest, 1)
    assert first is not None and second is not None
    if abs(first[0] * second[1]) != q:
        raise AssertionError(f"Bad covolume for {x}: {first}, {second}")
    b1, b2 = _canonical(*_gauss(first, second))
    u1 = Rational2Vector(Fraction(b1[0], q), Fraction(b1[1], q))
    u2 = Rational2Vector(Fraction(b2[0], q), Fraction(b2[1], q))
    return FareyLattice(
        owner=x,
        u1=u1,
        u2=u2,
        w1=_reduce_mod(b1[2], x),
        w2=_reduce_mod(b2[2], x),
        lam1_sq=u1.norm_sq,
        lam2_sq=u2.norm_sq,
    )


def basis_coordinates(L: FareyLattice, v: Rational2Vector) -> tuple[int, int]:
    """Integer coordinates (s, t) with v = s·u1 + t·u2."""
    d = L.u1.det(L.u2)
    s = v.det(L.u2) / d
    t = L.u1.det(v) / d
    if s.denominator != 1 or t.denominator != 1:
        raise ValueError(f"{v} is not a vector of Λ_{L.owner}")
    return int(s), int(t)


def lift(L: FareyLattice, v: Rational2Vector) -> IntVector3:
    """Integer preimage of v under π_x, last coordinate in [0, q)."""
    s, t = basis_coordinates(L, v)
    w1, w2 = L.w1, L.w2
    w = (
        s * w1[0] + t * w2[0],
        s * w1[1] + t * w2[1],
        s * w1[2] + t * w2[2],
    )
    return _reduce_mod(w, L.owner)


def sublattice_H(
    x: PrimitiveVector, L: FareyLattice | None = None, strict: bool = False
) -> tuple[Rational2Vector, IntVector3]:
    """Generator u1 of Λ′_x and a lift y′ of it.

    The lift has its last coordinate in (−q/2, q/2].
    """
    L = L or farey_lattice(x)
    if strict and L.lam1_sq == L.lam2_sq:
        raise TieBreak(f"Λ_{x} has two independent shortest vectors")
    w = L.w1
    if 2 * w[2] > x.q:
        w = (w[0] - x.p1, w[1] - x.p2, w[2] - x.q)
    return L.u1, w


def member_H(
    x: PrimitiveVector, y: PrimitiveVector, L: FareyLattice | None = None
) -> bool:
    """y ∈ H_x iff ŷ − x̂ is parallel to the shortest vector of Λ_x."""
    L = L or farey_lattice(x)
    (xa, xb), (ya, yb) = x.point, y.point
    return Rational2Vector(ya - xa, yb - xb).det(L.u1) == 0


def lambda1_alpha(x: PrimitiveVector, alpha: Rational2Vector) -> CertifiedReal:
    """First minimum of the projection of Λ_x on the line orthogonal to α."""
    L = farey_lattice(x)
    try:
        s, t = basis_coordinates(L, alpha)
    except ValueError as e:
        raise NotPrimitive(str(e)) from e
    if math.gcd(s, t) != 1:
        raise NotPrimitive(f"{alpha} = {s}·u1 + {t}·u2 is not primitive")
    return CertifiedReal.sqrt(1 / (alpha.norm_sq * x.q**2))


def in_Q_mu(
    x: PrimitiveVector, mu: Fraction, L: FareyLattice | None = None
) -> bool:
    """λ₁(x) ≤ |x|^{−μ}, decided exactly."""
    L = L or farey_lattice(x)
    return sqrt_le_power(L.lam1_sq, x.q, -mu)


def wedge_projection_identity(x: PrimitiveVector, y: PrimitiveVector) -> bool:
    """‖π_y(x)‖ = |x∧y|/|y|, compared on squares."""
    projected = project_along(y, x.as_tuple())
    return projected.norm_sq * y.q**2 == wedge_sq(x, y)
