#!/usr/bin/env -S uv run pytest
"""Tests for Cantor tree parameters."""

from fractions import Fraction

import pytest

import bukzor_singular.cantor.params as M  # module under test
from bukzor_singular.config import AUTO_B_FALLBACK
from bukzor_singular.errors import DomainError
from bukzor_singular.exponents import b0


def test_auto_b_rounds_b0():
    """Below √2/2, "auto" is b₀(μ) on a 1/1024 grid."""
    mu = Fraction(3, 5)
    b = M.resolve_b(mu, "auto")
    assert (M.AUTO_B_DENOMINATOR % b.denominator) == 0
    assert abs(b - b0(mu).midpoint) <= Fraction(1, 2 * M.AUTO_B_DENOMINATOR)


def test_auto_b_fallback():
    """Above √2/2 there is no b₀ and a fixed large b is used."""
    assert M.resolve_b(Fraction(3, 4), "auto") == AUTO_B_FALLBACK


def test_explicit_b_kept():
    """An explicit b passes through unchanged."""
    assert M.resolve_b(Fraction(3, 5), Fraction(7, 3)) == Fraction(7, 3)


@pytest.mark.parametrize(
    "kwargs,error,match",
    [
        ({"mu": Fraction(1, 2), "b": Fraction(1)}, DomainError, "μ"),
        ({"mu": Fraction(3, 5), "b": Fraction(0)}, DomainError, "b must"),
        (
            {"mu": Fraction(3, 5), "b": Fraction(1), "c1": Fraction(1, 2)},
            ValueError,
            "c1",
        ),
        (
            {"mu": Fraction(3, 5), "b": Fraction(1), "c4": Fraction(0)},
            ValueError,
            "c4",
        ),
        (
            {"mu": Fraction(3, 5), "b": Fraction(1), "cap": 0},
            ValueError,
            "cap",
        ),
        (
            {"mu": Fraction(3, 5), "b": Fraction(1), "min_height": 0},
            ValueError,
            "height",
        ),
    ],
)
def test_validation(kwargs, error, match):
    """Out-of-range parameters are rejected with a clear message."""
    with pytest.raises(error, match=match):
        M.TreeParams(**kwargs)


def test_windows_exact_at_root():
    """(1,0,2) at μ = 3/5, b = 1: the E₁ window starts at 2^15."""
    params = M.TreeParams.of(Fraction(3, 5), 1)
    low = params.y_window(Fraction(1), 2)
    assert low.is_exact and low.lower == 2**15
    top = params.z_window(2**15)
    assert top.is_exact and top.lower == 2**30


def test_c0():
    """c0 = 32^{1/(1−μ)}."""
    params = M.TreeParams.of(Fraction(4, 5), 1)
    assert params.c0.is_exact
    assert params.c0.lower == 32**5


def test_witnesses_from_cap():
    """Each witness contributes two children."""
    assert M.TreeParams.of(Fraction(3, 5), 1, cap=8).witnesses == 4
    assert M.TreeParams.of(Fraction(3, 5), 1, cap=3).witnesses == 2


def test_frozen_marks_calibrated():
    """Freezing constants marks the parameters calibrated."""
    params = M.TreeParams.of(Fraction(3, 5), 1)
    frozen = params.frozen(c2=Fraction(1, 8))
    assert frozen.calibrated and not params.calibrated
    assert frozen.c2 == Fraction(1, 8)


def test_dict_round_trip():
    """Serialized parameters come back equal."""
    params = M.TreeParams.of(Fraction(3, 5), "auto", cap=4).frozen(
        c1=Fraction(1, 8), c4=Fraction(8)
    )
    data = params.as_dict()
    assert data["mu"] == "3/5"
    assert M.TreeParams.from_dict(data) == params
