#!/usr/bin/env -S uv run pytest
"""Tests for certified real enclosures."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

import bukzor_singular.certified as M  # module under test
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import TieBreak

CR = M.CertifiedReal


def test_exact_values_are_points():
    """Exact values have zero width and carry their square."""
    v = CR.exact(Fraction(3, 4))
    assert v.is_exact
    assert v.width == 0
    assert v.square == Fraction(9, 16)


def test_sqrt_perfect_square_is_exact():
    """Square roots of rational squares are exact."""
    assert CR.sqrt(Fraction(9, 4)).lower == Fraction(3, 2)
    assert CR.sqrt(Fraction(9, 4)).is_exact
    assert CR.sqrt(0).is_exact


def test_sqrt_two_encloses_and_refines():
    """√2 is enclosed and the enclosure shrinks with more bits."""
    r = CR.sqrt(2)
    assert r.lower**2 < 2 < r.upper**2
    finer = r.refine(256)
    assert finer.width < r.width
    assert finer.lower**2 < 2 < finer.upper**2


def test_sqrt_negative_raises():
    """Negative radicands are a domain error."""
    with pytest.raises(DomainError, match="negative"):
        CR.sqrt(-1)


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=10**6))
def test_sqrt_brackets_value(v: Fraction):
    """lower² ≤ v ≤ upper² for random rationals."""
    r = CR.sqrt(v)
    assert r.lower**2 <= v <= r.upper**2


def test_power_exact_cases():
    """Integer exponents and perfect roots stay exact."""
    assert CR.power(2, 10).lower == 1024
    assert CR.power(Fraction(1, 8), Fraction(-2, 3)).lower == 4
    assert CR.power(32, Fraction(5, 2)).square == Fraction(32**5)


def test_power_matches_mpmath():
    """A transcendental power agrees with a high-precision evaluation."""
    value = CR.power(10**40, Fraction(-11, 5))
    with mpmath.workdps(60):
        expected = mpmath.mpf(10) ** mpmath.mpf(-88)
        assert value.lower <= Fraction(str(expected * (1 + 10**-30)))
        assert value.upper >= Fraction(str(expected * (1 - 10**-30)))


def test_power_of_five_halves_of_32():
    """32^{1/(1−0.6)} = 32^{5/2} = 2^{12.5} encloses 5792.6."""
    c0 = CR.power(32, Fraction(5, 2))
    assert c0.lower < Fraction(57927, 10) < c0.upper


def test_arithmetic_encloses():
    """Sums and products of enclosures contain the true value."""
    s2 = CR.sqrt(2)
    s3 = CR.sqrt(3)
    total = s2 + s3
    assert total.lower < Fraction(31462643699, 10**10) < total.upper
    prod = s2 * s3
    assert prod.square == 6
    assert prod.lower**2 <= 6 <= prod.upper**2
    assert (1 - s2).upper < 0
    assert (s2 / 2).lower < Fraction(70710678, 10**8) < (s2 / 2).upper


def test_compare_uses_squares_when_known():
    """√8 and 2√2 compare equal through their exact squares."""
    assert CR.sqrt(8).compare(CR.sqrt(2) * CR.sqrt(4)) == 0


def test_compare_refines():
    """Close values are separated by refinement."""
    a = CR.sqrt(2)
    b = CR.exact(Fraction(14142135623730951, 10**16))
    assert a < b


def test_compare_tie_raises():
    """Equal values without a proof of equality raise TieBreak."""
    a = CR.log(2) + CR.log(3)
    b = CR.log(6)
    with pytest.raises(TieBreak):
        a.compare(b)


def test_precision_ceiling():
    """A gap of 5·10⁻⁵¹ is split by default but not at 128 bits."""
    a = CR.log(2)
    b = CR.exact(Fraction(69314718055994530941723212145817656807550013436026))
    b = b / 10**50
    assert a < b
    with M.precision_ceiling(128):
        with pytest.raises(TieBreak):
            a.compare(b)
    assert a < b
    with pytest.raises(ValueError):
        with M.precision_ceiling(8):
            pass


def test_floor_and_ceil():
    """floor/ceil of irrationals are decided by refinement."""
    assert CR.sqrt(10).floor() == 3
    assert CR.sqrt(10).ceil() == 4
    assert CR.exact(5).floor() == 5


def test_log_and_pow_methods():
    """ln() and ** on inexact values enclose the truth."""
    x = CR.sqrt(2)
    ln = x.ln()
    assert ln.lower < Fraction(34657359, 10**8) < ln.upper
    sq = x ** Fraction(2)
    assert sq.lower <= 2 <= sq.upper


def test_to_decimal_digits():
    """Decimal rendering has the requested significant digits."""
    d = CR.sqrt(2).to_decimal(30)
    assert str(d).startswith("1.4142135623730950488016887242")


def test_sqrt_le_power_exact_path():
    """√(1/4) ≤ 2^{-1/2} is decided exactly: 1/4 ≤ 1/2."""
    assert M.sqrt_le_power(Fraction(1, 4), 2, Fraction(-1, 2))
    assert not M.sqrt_le_power(Fraction(1, 1), 2, Fraction(-1, 2))


def test_dyadic_floor():
    """Largest power of two below a value."""
    assert M.dyadic_floor(Fraction(3, 4)) == Fraction(1, 2)
    assert M.dyadic_floor(Fraction(1, 2)) == Fraction(1, 2)
    assert M.dyadic_floor(CR.sqrt(2)) == 1
    assert M.dyadic_floor(Fraction(5)) == 4
