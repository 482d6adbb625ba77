"""Mass distribution on the cylinders of a ball tree.

The root carries mass 1. A node x splits its mass among its children z in
proportion to diam B(z)^s, so with M(x) = Σ_z diam B(z)^s each child gets
μ(z) = μ(x)·diam B(z)^s / M(x). When M(x) ≥ diam B(x)^s at every interior
node, induction gives μ(x) ≤ (diam B(x)/diam B(root))^s.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction

from bukzor_singular.cantor.base import BallTree
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.errors import DepthInsufficient
from bukzor_singular.types import NodeId

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class CylinderMeasure:
    s: Fraction
    weights: dict[NodeId, CertifiedReal]
    sums: dict[NodeId, CertifiedReal]
    additivity_failures: list[NodeId] = field(default_factory=list)
    hypothesis_failures: list[NodeId] = field(default_factory=list)
    bound_failures: list[NodeId] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not (
            self.additivity_failures
            or self.hypothesis_failures
            or self.bound_failures
        )


def _overlaps(a: CertifiedReal, b: CertifiedReal) -> bool:
    return a.lower <= b.upper and b.lower <= a.upper


def mass_measure(tree: BallTree, s: Fraction) -> CylinderMeasure:
    """Weights of every node of *tree* at exponent *s*.

    A capped tree splits over the children it has; the result is then
    flagged as truncated.
    """
    s = Fraction(s)
    if s <= 0:
        raise ValueError(f"Exponent must be positive: {s}")
    root = tree.root
    if not tree.children_of(root):
        raise DepthInsufficient("the tree has no children below its root")
    truncated = not tree.complete
    if truncated:
        logger.warning("tree is capped; masses renormalize over kept children")

    def size(node: NodeId) -> CertifiedReal:
        return tree.diameter(node) ** s

    weights = {root: CertifiedReal.exact(1)}
    sums: dict[NodeId, CertifiedReal] = {}
    additivity, hypothesis, bound = [], [], []
    base = size(root)
    for node in tree.walk():
        kids = tree.children_of(node)
        if not kids:
            continue
        parts = [size(k) for k in kids]
        total = sum(parts[1:], parts[0])
        sums[node] = total
        for k, part in zip(kids, parts):
            weights[k] = weights[node] * part / total
        split = [weights[k] for k in kids]
        if not _overlaps(sum(split[1:], split[0]), weights[node]):
            additivity.append(node)
        if total < size(node):
            hypothesis.append(node)
    for node, w in weights.items():
        if node != root and w > size(node) / base:
            bound.append(node)
    logger.info(
        "s=%s: %d nodes, %d below the M(x) ≥ diam^s hypothesis",
        s,
        len(weights),
        len(hypothesis),
    )
    return CylinderMeasure(
        s, weights, sums, additivity, hypothesis, bound, truncated
    )
