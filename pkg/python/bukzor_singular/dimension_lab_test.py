#!/usr/bin/env -S uv run pytest
"""Tests for the counting profile, box counting and covering audits."""

from dataclasses import dataclass
from fractions import Fraction

import pytest

import bukzor_singular.dimension_lab as M  # module under test
from bukzor_singular.cantor.base import BallTree
from bukzor_singular.cantor.measure import mass_measure
from bukzor_singular.cantor.params import TreeParams
from bukzor_singular.cantor.tree import build_tree
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.errors import DegenerateScales
from bukzor_singular.errors import DepthInsufficient
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import HeightTooSmall
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import in_Q_mu
from bukzor_singular.rational_geometry import member_H
from bukzor_singular.types import NodeId
from bukzor_singular.types import RationalPoint

F = Fraction
PV = PrimitiveVector
ROOT = PV(1, 0, 2)
MU = F(3, 4)


def exact(value: Fraction) -> CertifiedReal:
    return CertifiedReal.exact(value)


def scene(cluster: list[RationalPoint]) -> M.CountingScene:
    """R0 = 1 > R1 = 1/4 > R2 = 1/16 > R3 = 1/64, H = 1/2, V = 1/4."""
    return M.CountingScene(
        R0=exact(F(1)),
        R1=exact(F(1, 4)),
        R2=exact(F(1, 16)),
        R3=exact(F(1, 64)),
        H=exact(F(1, 2)),
        V=exact(F(1, 4)),
        C0=F(1),
        clusters=(((F(0), F(0)), tuple(cluster)),),
    )


LINE = [(F(i, 16), F(0)) for i in range(-3, 4)]
RADII = [F(1, 64), F(1, 16), F(1, 4), F(1)]


@dataclass
class BinaryTree(BallTree):
    """Two children per node, diameters 4^{-n} at depth n."""

    levels: int

    def _level(self, node: NodeId) -> int:
        return (node + 1).bit_length() - 1

    def children_of(self, node: NodeId) -> list[NodeId]:
        if self._level(node) >= self.levels:
            return []
        return [NodeId(2 * node + 1), NodeId(2 * node + 2)]

    def parent_of(self, node: NodeId) -> NodeId | None:
        return None if node == 0 else NodeId((node - 1) // 2)

    def center(self, node: NodeId) -> RationalPoint:
        return F(node), F(0)

    def radius(self, node: NodeId) -> CertifiedReal:
        return exact(F(1, 2 * 4 ** self._level(node)))


def test_counting_hypotheses():
    """The designed scene meets every assumption of the counting bound."""
    checks = {c.name: c.ok for c in scene(LINE).hypotheses()}
    assert all(checks.values()), checks


def test_counting_profile_counts():
    """Closed balls: one point, a point and its two neighbours, all."""
    report = M.counting_profile(scene(LINE), F(1), RADII)
    assert [row.count for row in report.rows] == [1, 3, 7, 7]
    assert report.ok and report.hypotheses_ok
    assert report.rows[2].f.is_exact and report.rows[2].f.lower == 28


def test_counting_bound_value():
    """72·C0⁴·max{R3^{−1}, R1R0²/(VHR2)·R0^{−1}} = 72·64."""
    bound = M.counting_bound(scene(LINE), F(1))
    assert bound.is_exact and bound.lower == 72 * 64


def test_counting_small_s():
    """At s = 1/2 the terms are 8, 32 and R1^{1−s}/R2 = 8."""
    small = M.counting_bound(scene(LINE), F(1, 2))
    assert small.is_exact and small.lower == 72 * 32


def test_counting_cases():
    """Radii fall in the ranges of the proof, ends included."""
    cases = [M.counting_cases(scene(LINE), F(1), r)[0] for r in RADII]
    assert cases == [1, 1, 2, 5]
    _, g = M.counting_cases(scene(LINE), F(1), F(1))
    assert g.lower == 72 * 32


def test_counting_violation_detected():
    """Eighty points in one child ball break the bound and the assumptions."""
    crowded = scene([(F(0), F(0))] * 80)
    report = M.counting_profile(crowded, F(1), [F(1, 64)])
    assert not report.ok
    assert report.rows[0].violated
    failed = {c.name for c in crowded.hypotheses() if not c.ok}
    assert failed == {"cluster_size"}


def test_counting_single_point():
    """A one-point scene stays far under the bound."""
    report = M.counting_profile(scene([(F(0), F(0))]), F(1, 2), RADII)
    assert report.ok
    assert {row.count for row in report.rows} == {1}


def test_counting_radius_outside():
    """Radii must lie between R3 and R0."""
    with pytest.raises(ValueError, match="outside"):
        M.counting_profile(scene(LINE), F(1), [F(2)])


def test_counting_exponent_range():
    """The bound is stated for 0 < s ≤ 2."""
    with pytest.raises(DomainError):
        M.counting_bound(scene(LINE), F(3))


def test_counting_default_radii():
    """Dyadic radii from R0 down to R3."""
    expected = [F(1, 2**k) for k in range(6, -1, -1)]
    assert M.default_radii(scene(LINE)) == expected


def test_counting_tree_scene():
    """The capped children of (1,0,2) give a two-point scene in bounds."""
    params = TreeParams.of(F(3, 5), F(1), cap=2)
    tree = build_tree(ROOT, params, depth=1)
    root_scene = M.scene_from_node(tree, NodeId(0), tiling_limit=40)
    assert len(root_scene.points) == 2
    assert len(root_scene.clusters) == 1
    report = M.counting_profile(root_scene, F(1))
    assert report.ok
    assert max(row.count for row in report.rows) <= 2
    with pytest.raises(DepthInsufficient):
        M.scene_from_node(tree, NodeId(1))


def test_boxcount_single_point():
    """All points equal: one box at every scale."""
    result = M.boxcount([(F(1, 3), F(1, 3))] * 5, [F(1, 2), F(1, 4), F(1, 8)])
    assert result.counts == (1, 1, 1)
    assert result.slope == pytest.approx(0, abs=1e-9)


def test_boxcount_full_grid():
    """4^k grid points in the unit square have slope 2."""
    points = [(F(i, 16), F(j, 16)) for i in range(16) for j in range(16)]
    scales = [F(1, 2**k) for k in range(1, 5)]
    result = M.boxcount(points, scales)
    assert result.counts == (4, 16, 64, 256)
    assert result.slope == pytest.approx(2)
    assert result.stderr == pytest.approx(0, abs=1e-9)
    assert result.within(2.0, 1e-6)


def test_boxcount_segment():
    """Points on a segment have slope 1."""
    points = [(F(i, 16), F(0)) for i in range(16)]
    result = M.boxcount(points, [F(1, 2**k) for k in range(1, 5)])
    assert result.slope == pytest.approx(1)


def test_boxcount_negative_coordinates():
    """Boxes are anchored at the origin on both sides."""
    assert M.box_occupancy([(F(-1, 4), F(0)), (F(1, 4), F(0))], F(1, 2)) == 2


@pytest.mark.parametrize(
    "scales", [[F(1, 2)], [F(1, 2), F(1, 2)], [F(1, 2), F(0)]]
)
def test_boxcount_degenerate(scales):
    """Two distinct positive scales are needed."""
    with pytest.raises(DegenerateScales):
        M.boxcount([(F(0), F(0))], scales)


def test_local_dimension_exact():
    """2 children, radius ratio 1/4, s = 1/2: every ratio is exactly 1/2."""
    tree = BinaryTree(3)
    result = M.local_dimension(mass_measure(tree, F(1, 2)), tree)
    assert len(result.rows) == 8
    assert all(r.is_exact and r.lower == F(1, 2) for _, r in result.rows)
    assert result.quantiles["median"] == pytest.approx(0.5)
    assert not result.flagged


def test_local_dimension_large_s_flagged():
    """At s = 2 the ratios stay at 1/2, far below s."""
    tree = BinaryTree(3)
    result = M.local_dimension(mass_measure(tree, F(2)), tree)
    assert result.share_below == 1.0
    assert result.flagged


def test_local_dimension_sample():
    """Sampling keeps the requested number of leaves."""
    tree = BinaryTree(3)
    result = M.local_dimension(mass_measure(tree, F(1, 2)), tree, sample=3)
    assert len(result.rows) == 3


def test_local_dimension_seeded_sample():
    """The same seed picks the same leaves."""
    tree = BinaryTree(3)
    measure = mass_measure(tree, F(1, 2))
    first = M.local_dimension(measure, tree, sample=4, seed=7)
    again = M.local_dimension(measure, tree, sample=4, seed=7)
    assert [n for n, _ in first.rows] == [n for n, _ in again.rows]
    assert len({n for n, _ in first.rows}) == 4


def test_local_dimension_root_only():
    """A lone root has no local dimension."""
    measure = mass_measure(BinaryTree(1), F(1, 2))
    with pytest.raises(DepthInsufficient):
        M.local_dimension(measure, BinaryTree(0))


@pytest.fixture(scope="module")
def e_points() -> list[PrimitiveVector]:
    return M.covering_E(ROOT, MU, 60)


def test_covering_E_window(e_points):
    """On α = u2 the window opens exactly at |y| = 16."""
    assert PV(8, 1, 16) in e_points
    assert PV(7, 1, 14) not in e_points


def test_covering_E_definition(e_points):
    """Every point is higher than x, off H_x and in Q_μ."""
    assert e_points
    for y in e_points:
        assert y.q > ROOT.q
        assert not member_H(ROOT, y)
        assert in_Q_mu(y, MU)


def test_covering_D_contains_y():
    """y itself is the lowest point of D(y)."""
    y = PV(8, 1, 16)
    points = M.covering_D(y, MU, 60)
    assert points[0] == y
    assert all(member_H(y, z) for z in points)


@pytest.fixture(scope="module")
def tiny_s() -> M.CoveringAudit:
    return M.upper_covering_audit(ROOT, MU, F(1, 100), F(0), 60)


@pytest.fixture(scope="module")
def large_s() -> M.CoveringAudit:
    return M.upper_covering_audit(ROOT, MU, F(2), F(0), 60)


def test_audit_small_exponent_exceeds(tiny_s):
    """With s close to 0 every ball counts about once, so the sum passes 1."""
    assert tiny_s.ratio > 1


def test_audit_decreasing_in_s(tiny_s, large_s):
    """Every ball is smaller than B(x), so the ratio falls as s grows."""
    assert len(tiny_s.terms) == len(large_s.terms)
    assert large_s.ratio < tiny_s.ratio


def test_audit_monotone_in_cutoff(tiny_s):
    """Partial sums only grow with the cutoff."""
    sums = [tiny_s.ratio_at(c) for c in (20, 40, 60)]
    assert sums == sorted(sums)
    assert sums[-1] == tiny_s.ratio


def test_audit_shells(tiny_s):
    """Shells cover every term and accumulate to the full ratio."""
    rows = M.audit_shells(tiny_s)
    assert [(r.lo, r.hi) for r in rows] == [(10, 100)]
    assert sum(r.terms for r in rows) == len(tiny_s.terms)
    assert float(rows[-1].cumulative) == pytest.approx(float(tiny_s.ratio))


def test_audit_exponents():
    """s = 2(1−μ) + 1/10 at μ = 3/4: B − b = 7/5 and A − a = 0."""
    audit = M.upper_covering_audit(ROOT, MU, F(3, 5), F(0), 30)
    assert audit.exponents.B_minus_b == F(7, 5)
    assert audit.exponents.A_minus_a == 0
    assert audit.summable
    assert audit.predicted_decay == F(7, 5)


def test_audit_outside_Q_mu():
    """λ₁((1,1,3)) = √2/3 exceeds 3^{−3/4}."""
    with pytest.raises(HeightTooSmall):
        M.upper_covering_audit(PV(1, 1, 3), MU, F(1), F(0), 100)


def test_audit_cutoff_too_low():
    """The cutoff must exceed |x|."""
    with pytest.raises(HeightTooSmall, match="cutoff"):
        M.upper_covering_audit(ROOT, MU, F(1), F(0), 2)


def test_audit_mu_range():
    """μ must lie in (1/2, 1)."""
    with pytest.raises(DomainError):
        M.upper_covering_audit(ROOT, F(1, 2), F(1), F(0), 100)
