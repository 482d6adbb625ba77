"""Certified real numbers: exact rational enclosures that refine on demand.

Irrational quantities such as λ₁ = √lam1_sq or |x|^{−μ} are carried as a
closed interval [lower, upper] with rational endpoints. Every value remembers
how to recompute itself at a higher precision, so a comparison that cannot be
decided at the current width is retried with twice the bits before giving up
with TieBreak.

Transcendental enclosures (log, exp, non-square powers) come from the
outward-rounded interval context of mpmath. Square roots are computed with
integer square roots and need no floating point at all.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from dataclasses import field
from decimal import Decimal
from decimal import localcontext
from fractions import Fraction
from typing import Any
from typing import Self

import mpmath
from mpmath.libmp import to_rational

from bukzor_singular.config import DEFAULT_PRECISION
from bukzor_singular.config import MAX_PRECISION
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import TieBreak

logger = logging.getLogger(__name__)

Interval = tuple[Fraction, Fraction]
Refiner = Callable[[int], Interval]

# Largest integer exponent for which an exact power is attempted.
EXACT_POWER_LIMIT = 256

# Refinement stops here and undecided comparisons raise TieBreak.
_ceiling = MAX_PRECISION


@contextmanager
def precision_ceiling(bits: int) -> Iterator[None]:
    """Lower the refinement ceiling to *bits* inside the block."""
    global _ceiling
    if not DEFAULT_PRECISION <= bits <= MAX_PRECISION:
        raise ValueError(
            f"Precision must lie in [{DEFAULT_PRECISION}, {MAX_PRECISION}]:"
            f" {bits}"
        )
    saved, _ceiling = _ceiling, bits
    try:
        yield
    finally:
        _ceiling = saved


@contextmanager
def _iv_precision(bits: int) -> Iterator[None]:
    saved = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = saved


def _iv(value: Fraction) -> Any:
    return mpmath.iv.mpf(value.numerator) / value.denominator


def _endpoints(value: Any) -> Interval:
    lo, hi = value._mpi_  # pyright: ignore[reportUnknownMemberType]
    return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


def _guard_bits(*values: Fraction) -> int:
    """Extra bits so that exp() of a large argument keeps relative accuracy."""
    size = max((abs(v.numerator).bit_length() for v in values), default=0)
    return 16 + size.bit_length() + 8


def _iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = 1 << -(-n.bit_length() // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    return r if r**k == n else None


def _interval_add(a: Interval, b: Interval) -> Interval:
    return a[0] + b[0], a[1] + b[1]


def _interval_sub(a: Interval, b: Interval) -> Interval:
    return a[0] - b[1], a[1] - b[0]


def _interval_mul(a: Interval, b: Interval) -> Interval:
    if a[0] >= 0 and b[0] >= 0:
        return a[0] * b[0], a[1] * b[1]
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(products), max(products)


def _interval_div(a: Interval, b: Interval) -> Interval:
    if b[0] <= 0 <= b[1]:
        raise ZeroDivisionError(f"divisor enclosure {b} contains zero")
    return _interval_mul(a, (1 / b[1], 1 / b[0]))


@dataclass(frozen=True, slots=True, eq=False)
class CertifiedReal:
    """A real number known to lie in [lower, upper].

    ``square`` is set when the value is the non-negative square root of a
    known rational, which lets comparisons between such values stay exact.
    """

    lower: Fraction
    upper: Fraction
    bits: int = DEFAULT_PRECISION
    square: Fraction | None = None
    refiner: Refiner | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(
                f"Empty enclosure: lower {self.lower} > upper {self.upper}"
            )

    # Constructors

    @classmethod
    def exact(cls, value: int | Fraction) -> Self:
        v = Fraction(value)
        return cls(v, v, square=v * v if v >= 0 else None)

    @classmethod
    def from_refiner(
        cls,
        refiner: Refiner,
        bits: int = DEFAULT_PRECISION,
        square: Fraction | None = None,
    ) -> Self:
        lo, hi = refiner(bits)
        if lo == hi:
            return cls(lo, hi, bits, square)
        return cls(lo, hi, bits, square, refiner)

    @classmethod
    def sqrt(
        cls, value: int | Fraction, bits: int = DEFAULT_PRECISION
    ) -> Self:
        """Enclosure of √value using integer square roots only."""
        v = Fraction(value)
        if v < 0:
            raise DomainError(f"Square root of negative value {v}")
        n, d = v.numerator, v.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            root = Fraction(rn, rd)
            return cls(root, root, bits, v)
        nd = n * d

        def refine(prec: int) -> Interval:
            k = max(0, prec + 2 - nd.bit_length() // 2)
            r = math.isqrt(nd << (2 * k))
            scale = d << k
            return Fraction(r, scale), Fraction(r + 1, scale)

        return cls.from_refiner(refine, bits, square=v)

    @classmethod
    def log(cls, value: int | Fraction, bits: int = DEFAULT_PRECISION) -> Self:
        v = Fraction(value)
        if v <= 0:
            raise DomainError(f"Logarithm of non-positive value {v}")
        if v == 1:
            return cls.exact(0)

        def refine(prec: int) -> Interval:
            with _iv_precision(prec + 8):
                return _endpoints(mpmath.iv.log(_iv(v)))

        return cls.from_refiner(refine, bits)

    @classmethod
    def power(
        cls,
        base: int | Fraction,
        exponent: int | Fraction,
        bits: int = DEFAULT_PRECISION,
    ) -> Self:
        """Enclosure of base**exponent for base > 0 and rational exponent.

        Exact whenever the result is rational.
        """
        b, e = Fraction(base), Fraction(exponent)
        if b <= 0:
            raise DomainError(f"Power of non-positive base {b}")
        size = b.numerator.bit_length() + b.denominator.bit_length()
        if e.denominator == 1 and abs(e.numerator) * size <= 1 << 16:
            return cls.exact(b**e.numerator)
        if b == 1 or e == 0:
            return cls.exact(1)
        if abs(e.numerator) <= EXACT_POWER_LIMIT and e.denominator <= 64:
            rn = _iroot(b.numerator, e.denominator)
            rd = _iroot(b.denominator, e.denominator)
            if rn is not None and rd is not None:
                return cls.exact(Fraction(rn, rd) ** e.numerator)
            if e.denominator == 2:
                return cls.sqrt(b**e.numerator, bits)

        guard = _guard_bits(b, e)

        def refine(prec: int) -> Interval:
            with _iv_precision(prec + guard):
                log_base = mpmath.iv.log(_iv(b))
                return _endpoints(mpmath.iv.exp(_iv(e) * log_base))

        return cls.from_refiner(refine, bits)

    # Enclosure plumbing

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def enclosure(self, bits: int) -> Interval:
        if self.refiner is None or bits <= self.bits:
            return self.lower, self.upper
        return self.refiner(bits)

    def refine(self, bits: int) -> CertifiedReal:
        if self.refiner is None or bits <= self.bits:
            return self
        lo, hi = self.refiner(bits)
        return CertifiedReal(lo, hi, bits, self.square, self.refiner)

    def contains(self, value: int | Fraction) -> bool:
        return self.lower <= value <= self.upper

    def _combine(
        self,
        other: int | Fraction | CertifiedReal,
        op: Callable[[Interval, Interval], Interval],
        swap: bool = False,
    ) -> CertifiedReal:
        a, b = self, coerce(other)
        if swap:
            a, b = b, a

        def refine(prec: int) -> Interval:
            return op(a.enclosure(prec), b.enclosure(prec))

        bits = max(a.bits, b.bits)
        lo, hi = refine(bits)
        exact = a.refiner is None and b.refiner is None
        return CertifiedReal(lo, hi, bits, None, None if exact else refine)

    def __add__(self, other: int | Fraction | CertifiedReal) -> CertifiedReal:
        return self._combine(other, _interval_add)

    def __radd__(self, other: int | Fraction) -> CertifiedReal:
        return self._combine(other, _interval_add, swap=True)

    def __sub__(self, other: int | Fraction | CertifiedReal) -> CertifiedReal:
        return self._combine(other, _interval_sub)

    def __rsub__(self, other: int | Fraction) -> CertifiedReal:
        return self._combine(other, _interval_sub, swap=True)

    def __mul__(self, other: int | Fraction | CertifiedReal) -> CertifiedReal:
        result = self._combine(other, _interval_mul)
        o = coerce(other)
        if self.square is not None and o.square is not None:
            return CertifiedReal(
                result.lower,
                result.upper,
                result.bits,
                self.square * o.square,
                result.refiner,
            )
        return result

    def __rmul__(self, other: int | Fraction) -> CertifiedReal:
        return coerce(other) * self

    def __truediv__(
        self, other: int | Fraction | CertifiedReal
    ) -> CertifiedReal:
        return self._divide(self, coerce(other))

    def __rtruediv__(self, other: int | Fraction) -> CertifiedReal:
        return self._divide(coerce(other), self)

    @staticmethod
    def _divide(a: CertifiedReal, b: CertifiedReal) -> CertifiedReal:
        bits = max(a.bits, b.bits)
        while True:
            lo, hi = b.enclosure(bits)
            if lo > 0 or hi < 0:
                break
            if lo == hi == 0:
                raise ZeroDivisionError("division by exact zero")
            if bits >= _ceiling:
                raise TieBreak(f"cannot separate divisor {b!r} from zero")
            bits *= 2
        a, b = a.refine(bits), b.refine(bits)
        result = a._combine(b, _interval_div)
        if a.square is not None and b.square is not None and b.square != 0:
            return CertifiedReal(
                result.lower,
                result.upper,
                result.bits,
                a.square / b.square,
                result.refiner,
            )
        return result

    def __neg__(self) -> CertifiedReal:
        source = self

        def refine(prec: int) -> Interval:
            lo, hi = source.enclosure(prec)
            return -hi, -lo

        refiner = None if self.refiner is None else refine
        return CertifiedReal(
            -self.upper, -self.lower, self.bits, None, refiner
        )

    def __pow__(self, exponent: int | Fraction) -> CertifiedReal:
        """Rational power of a positive value (monotone in the base)."""
        e = Fraction(exponent)
        if self.is_exact:
            return CertifiedReal.power(self.lower, e, self.bits)
        source = self.positive()

        def refine(prec: int) -> Interval:
            lo, hi = source.enclosure(prec)
            a = CertifiedReal.power(lo, e, prec).enclosure(prec)
            b = CertifiedReal.power(hi, e, prec).enclosure(prec)
            return (a[0], b[1]) if e >= 0 else (b[0], a[1])

        square = None
        if self.square is not None and e.denominator == 1:
            square = self.square**e.numerator
        return CertifiedReal.from_refiner(refine, source.bits, square)

    def ln(self) -> CertifiedReal:
        """Natural logarithm of a positive value."""
        if self.is_exact:
            return CertifiedReal.log(self.lower, self.bits)
        source = self.positive()

        def refine(prec: int) -> Interval:
            lo, hi = source.enclosure(prec)
            return (
                CertifiedReal.log(lo, prec).enclosure(prec)[0],
                CertifiedReal.log(hi, prec).enclosure(prec)[1],
            )

        return CertifiedReal.from_refiner(refine, source.bits)

    def positive(self) -> CertifiedReal:
        """Refine until the lower endpoint is strictly positive."""
        value: CertifiedReal = self
        while value.lower <= 0:
            if value.upper <= 0 or value.bits >= _ceiling:
                raise DomainError(f"value {self!r} is not positive")
            value = value.refine(value.bits * 2)
        return value

    # Decisions

    def compare(self, other: int | Fraction | CertifiedReal) -> int:
        """Return -1, 0 or 1; equality is only reported when provable."""
        o = coerce(other)
        if self.square is not None and o.square is not None:
            return (self.square > o.square) - (self.square < o.square)
        bits = max(self.bits, o.bits)
        while True:
            a_lo, a_hi = self.enclosure(bits)
            b_lo, b_hi = o.enclosure(bits)
            if a_hi < b_lo:
                return -1
            if a_lo > b_hi:
                return 1
            if a_lo == a_hi == b_lo == b_hi:
                return 0
            if bits >= _ceiling:
                raise TieBreak(
                    f"cannot separate {self!r} from {o!r} at {bits} bits"
                )
            bits *= 2
            logger.debug("refining comparison to %d bits", bits)

    def __lt__(self, other: int | Fraction | CertifiedReal) -> bool:
        return self.compare(other) < 0

    def __le__(self, other: int | Fraction | CertifiedReal) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other: int | Fraction | CertifiedReal) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other: int | Fraction | CertifiedReal) -> bool:
        return self.compare(other) >= 0

    def floor(self) -> int:
        bits = self.bits
        while True:
            lo, hi = self.enclosure(bits)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            if bits >= _ceiling:
                raise TieBreak(f"floor of {self!r} is undecided")
            bits *= 2

    def ceil(self) -> int:
        bits = self.bits
        while True:
            lo, hi = self.enclosure(bits)
            if math.ceil(lo) == math.ceil(hi):
                return math.ceil(lo)
            if bits >= _ceiling:
                raise TieBreak(f"ceiling of {self!r} is undecided")
            bits *= 2

    def __float__(self) -> float:
        return float(self.midpoint)

    def to_decimal(self, digits: int = 30) -> Decimal:
        """Midpoint rendered with *digits* significant digits."""
        value = self.refine(max(self.bits, int(digits * 3.33) + 8))
        mid = value.midpoint
        with localcontext() as ctx:
            ctx.prec = digits
            return Decimal(mid.numerator) / Decimal(mid.denominator)


def coerce(value: int | Fraction | CertifiedReal) -> CertifiedReal:
    if isinstance(value, CertifiedReal):
        return value
    return CertifiedReal.exact(value)


def sqrt_le_power(
    square: Fraction, base: int | Fraction, exponent: Fraction
) -> bool:
    """Decide √square ≤ base**exponent exactly when affordable.

    For exponent n/d this is square**d ≤ base**(2n), which stays in integers
    when d and the operand sizes are small.
    """
    b = Fraction(base)
    n, d = exponent.numerator, exponent.denominator
    size = d * (
        square.numerator.bit_length() + square.denominator.bit_length()
    )
    size += abs(n) * (b.numerator.bit_length() + b.denominator.bit_length())
    if size <= 1 << 20:
        return square**d <= b ** (2 * n)
    return CertifiedReal.sqrt(square) <= CertifiedReal.power(b, exponent)


def dyadic_floor(value: CertifiedReal | Fraction) -> Fraction:
    """Largest power of two not exceeding a positive value."""
    v = coerce(value)
    lower = v.positive().lower
    k = lower.numerator.bit_length() - lower.denominator.bit_length()
    candidate = Fraction(2) ** k
    while candidate > lower:
        candidate /= 2
    while candidate * 2 <= lower:
        candidate *= 2
    return candidate
