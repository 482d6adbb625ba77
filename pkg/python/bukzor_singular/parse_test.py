#!/usr/bin/env -S uv run pytest
"""Tests for command-line argument parsing."""

from fractions import Fraction as F

import pytest

import bukzor_singular.parse as M  # module under test


@pytest.mark.parametrize(
    "text,expected",
    [
        ("3/5", F(3, 5)),
        ("0.6", F(3, 5)),
        (" 7 ", F(7)),
        ("1e6", F(10**6)),
        ("2^-4", F(1, 16)),
        ("-3^3", F(-27)),
    ],
)
def test_fraction(text: str, expected: F):
    """Slashes, decimals, exponents and powers are all exact."""
    assert M.parse_fraction(text) == expected


@pytest.mark.parametrize("text", ["abc", "1/0", "", "0^-1", "2^x"])
def test_fraction_rejected(text: str):
    """Anything else is a ValueError."""
    with pytest.raises(ValueError):
        M.parse_fraction(text)


def test_int():
    """Integral rationals are accepted whatever their spelling."""
    assert M.parse_int("12") == 12
    assert M.parse_int("4/2") == 2
    assert M.parse_int("2^10") == 1024
    with pytest.raises(ValueError, match="Not an integer"):
        M.parse_int("1/2")


def test_vector():
    """Three integers, not yet reduced."""
    assert M.parse_vector("1,0,2") == (1, 0, 2)
    assert M.parse_vector("2,4,6") == (2, 4, 6)
    with pytest.raises(ValueError, match="p1,p2,q"):
        M.parse_vector("1,2")
    with pytest.raises(ValueError):
        M.parse_vector("1,2,1/2")


def test_point():
    assert M.parse_point("5/8,0") == (F(5, 8), F(0))
    with pytest.raises(ValueError):
        M.parse_point("1")


def test_range_inclusive():
    """Both ends are kept when the step divides the span."""
    assert M.parse_range("0.6:0.8:0.1") == [F(3, 5), F(7, 10), F(4, 5)]
    grid = M.parse_range("0.51:0.99:0.005")
    assert len(grid) == 97
    assert grid[0] == F(51, 100) and grid[-1] == F(99, 100)


def test_range_lone_value():
    assert M.parse_range("3/5") == [F(3, 5)]


def test_range_stops_short():
    """The last point never passes hi."""
    assert M.parse_range("0:1:0.3") == [F(0), F(3, 10), F(3, 5), F(9, 10)]


@pytest.mark.parametrize("text", ["1:0:0.1", "0:1:0", "0:1", "0:1:-1"])
def test_range_rejected(text: str):
    with pytest.raises(ValueError):
        M.parse_range(text)


def test_scales_power_range():
    """Every power of the base between the two ends, in order given."""
    scales = M.parse_scales("2^-4..2^-20")
    assert len(scales) == 17
    assert scales[0] == F(1, 16) and scales[-1] == F(1, 2**20)
    assert M.parse_scales("3^1..3^3") == [F(3), F(9), F(27)]


def test_scales_list():
    assert M.parse_scales("1/2, 1/4") == [F(1, 2), F(1, 4)]
    with pytest.raises(ValueError, match="positive"):
        M.parse_scales("1/2,0")
    with pytest.raises(ValueError, match="one base"):
        M.parse_scales("2^-1..3^-2")


def test_auto_values():
    """'auto' passes through for b and qmax."""
    assert M.parse_b("auto") == "auto"
    assert M.parse_b("32") == F(32)
    assert M.parse_qmax(" auto ") == "auto"
    assert M.parse_qmax("100") == 100


def test_checks():
    """Groups are deduplicated and keep their order."""
    assert M.parse_checks("packing,disjoint,packing") == [
        "packing",
        "disjoint",
    ]
    with pytest.raises(ValueError, match="Unknown checks"):
        M.parse_checks("nestedness,color")
    with pytest.raises(ValueError, match="No checks"):
        M.parse_checks(" , ")
