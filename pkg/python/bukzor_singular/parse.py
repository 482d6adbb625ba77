"""Command-line argument parsing: numbers, vectors, grids and check lists."""

import re
from fractions import Fraction
from typing import Literal
from typing import cast

from bukzor_singular.cantor.tree import CHECK_GROUPS
from bukzor_singular.types import IntVector3
from bukzor_singular.types import RationalPoint
from bukzor_singular.types import TreeCheck

_POWER = re.compile(r"^\s*(-?\d+)\s*\^\s*(-?\d+)\s*$")
_SCALE_RANGE = re.compile(r"^\s*(\d+)\^(-?\d+)\s*\.\.\s*(\d+)\^(-?\d+)\s*$")


def parse_fraction(text: str) -> Fraction:
    """An exact rational from '3/5', '0.6', '1e6' or '2^-4'."""
    match = _POWER.match(text)
    if match:
        base, exponent = map(int, match.groups())
        if base == 0 and exponent < 0:
            raise ValueError(f"Zero to a negative power: {text}")
        return Fraction(base) ** exponent
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"Not a rational number: {text!r}") from None


def parse_int(text: str) -> int:
    value = parse_fraction(text)
    if value.denominator != 1:
        raise ValueError(f"Not an integer: {text!r}")
    return value.numerator


def parse_vector(text: str) -> IntVector3:
    """'p1,p2,q' as three integers; primitivity is checked later."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"Expected p1,p2,q: {text!r}")
    p1, p2, q = (parse_int(p) for p in parts)
    return p1, p2, q


def parse_point(text: str) -> RationalPoint:
    """'a,b' as a rational point of the plane."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"Expected two coordinates: {text!r}")
    a, b = (parse_fraction(p) for p in parts)
    return a, b


def parse_range(text: str) -> list[Fraction]:
    """'lo:hi:step' as an inclusive arithmetic grid; a lone value is kept."""
    parts = text.split(":")
    if len(parts) == 1:
        return [parse_fraction(text)]
    if len(parts) != 3:
        raise ValueError(f"Expected lo:hi:step: {text!r}")
    lo, hi, step = (parse_fraction(p) for p in parts)
    if step <= 0:
        raise ValueError(f"Step must be positive: {text!r}")
    if hi < lo:
        raise ValueError(f"Empty range: {text!r}")
    count = int((hi - lo) / step)
    return [lo + k * step for k in range(count + 1)]


def parse_scales(text: str) -> list[Fraction]:
    """'2^-4..2^-20' as every power between the ends, or a comma list."""
    match = _SCALE_RANGE.match(text)
    if match:
        base, first, base2, last = map(int, match.groups())
        if base != base2 or base < 2:
            raise ValueError(f"Scale range needs one base >= 2: {text!r}")
        step = 1 if last >= first else -1
        return [
            Fraction(base) ** k for k in range(first, last + step, step)
        ]
    scales = [parse_fraction(p) for p in text.split(",")]
    if any(s <= 0 for s in scales):
        raise ValueError(f"Scales must be positive: {text!r}")
    return scales


def parse_b(text: str) -> Fraction | Literal["auto"]:
    if text.strip() == "auto":
        return "auto"
    return parse_fraction(text)


def parse_qmax(text: str) -> int | Literal["auto"]:
    if text.strip() == "auto":
        return "auto"
    return parse_int(text)


def parse_checks(text: str) -> list[TreeCheck]:
    """Comma-separated check groups, in the order given."""
    names = [n.strip() for n in text.split(",") if n.strip()]
    unknown = [n for n in names if n not in CHECK_GROUPS]
    if unknown:
        known = ", ".join(CHECK_GROUPS)
        raise ValueError(f"Unknown checks {unknown}; choose from {known}")
    if not names:
        raise ValueError("No checks given")
    return [cast(TreeCheck, n) for n in dict.fromkeys(names)]
