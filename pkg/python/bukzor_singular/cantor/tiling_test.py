#!/usr/bin/env -S uv run pytest
"""Tests for the distorted tiling and its exact polygon arithmetic."""

from fractions import Fraction

import pytest

import bukzor_singular.cantor.tiling as M  # module under test
from bukzor_singular.cantor.params import TreeParams
from bukzor_singular.rational_geometry import PrimitiveVector

ROOT = PrimitiveVector(1, 0, 2)
F = Fraction


@pytest.fixture(scope="module")
def tiling() -> M.Tiling:
    params = TreeParams.of(F(3, 5), F(1))
    return M.build_tiling(ROOT, params, limit=40)


def test_cells_follow_witnesses(tiling):
    """The first cells sit on the line α₀ = u2, one per height."""
    assert tiling.truncated
    assert len(tiling.cells) == 40
    assert {cell.m for cell in tiling.cells} == {0}
    assert [cell.a for cell in tiling.cells] == list(range(16384, 16424))


def test_corners(tiling):
    """c(m, a) = x̂ + α_m/(a·|x|)."""
    cell = tiling.cells[0]
    a = F(1, 2 * 16384)
    assert cell.corners[0] == (F(1, 2), a)
    assert cell.corners[1] == (F(1, 2) + a / 2, a)


def test_axioms(tiling):
    """Every tiling axiom and the ρ(x) band hold at the root."""
    params = TreeParams.of(F(3, 5), F(1))
    report = M.verify_tiling(tiling, params)
    assert report.ok, report.failures
    assert report.rho is not None
    assert tiling.V / 16 <= report.rho <= 16 * tiling.V


def test_exponent_powers(tiling):
    """|x|^h and |x|^v are carried beside H and V, with h > v."""
    assert tiling.x_v < tiling.x_h < 1


def test_adjacent_cells_share_a_side(tiling):
    """Neighbours along a line meet in a segment of zero area."""
    first, second = tiling.cells[:2]
    assert M.adjacent(first, second)
    assert M.overlap_area(first.corners, second.corners) == 0
    assert M.overlap_area(first.corners, first.corners) > 0
    assert M.overlapping_pairs(tiling.cells) == []


def test_clip_squares():
    """Two unit squares offset by (1/2, 1/2) overlap in a quarter."""
    square = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))
    shifted = tuple((x + F(1, 2), y + F(1, 2)) for x, y in square)
    assert M.overlap_area(square, shifted) == F(1, 4)
    assert M.overlap_area(square, square[::-1]) == 1


def test_clip_disjoint():
    """Far-apart squares do not intersect."""
    square = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))
    far = tuple((x + 3, y) for x, y in square)
    assert M.clip(square, far) == []


def test_closest_pair():
    """Squared distance of the nearest two points."""
    points = [(F(0), F(0)), (F(3), F(4)), (F(1), F(1)), (F(5), F(5))]
    assert M.closest_pair(points) == 2
    assert M.closest_pair(points[:1]) is None
