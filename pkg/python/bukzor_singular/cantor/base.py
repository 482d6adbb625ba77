"""Base class for nested ball trees."""

from __future__ import annotations

from abc import ABC
from abc import abstractmethod
from collections.abc import Iterator

from bukzor_singular.certified import CertifiedReal
from bukzor_singular.types import NodeId
from bukzor_singular.types import RationalPoint


class BallTree(ABC):
    """A rooted tree whose nodes carry closed balls B(center, radius).

    Node 0 is the root. Children of a node are listed in a fixed order, so
    every walk below is deterministic.
    """

    @abstractmethod
    def children_of(self, node: NodeId) -> list[NodeId]:
        """Ids of the children of *node*."""
        pass

    @abstractmethod
    def parent_of(self, node: NodeId) -> NodeId | None:
        """Id of the parent of *node*, None for the root."""
        pass

    @abstractmethod
    def center(self, node: NodeId) -> RationalPoint:
        """Center of the ball of *node*."""
        pass

    @abstractmethod
    def radius(self, node: NodeId) -> CertifiedReal:
        """Radius of the ball of *node*."""
        pass

    @property
    def root(self) -> NodeId:
        return NodeId(0)

    @property
    def complete(self) -> bool:
        """True when every interior node lists all of its children."""
        return True

    def diameter(self, node: NodeId) -> CertifiedReal:
        return 2 * self.radius(node)

    def walk(self) -> Iterator[NodeId]:
        """Breadth-first order from the root."""
        frontier = [self.root]
        while frontier:
            yield from frontier
            frontier = [c for n in frontier for c in self.children_of(n)]

    def depth_of(self, node: NodeId) -> int:
        depth = 0
        parent = self.parent_of(node)
        while parent is not None:
            depth += 1
            parent = self.parent_of(parent)
        return depth

    def leaves(self) -> list[NodeId]:
        return [n for n in self.walk() if not self.children_of(n)]

    def ancestry(self, node: NodeId) -> list[NodeId]:
        """Ids from the root down to *node*."""
        path = [node]
        parent = self.parent_of(node)
        while parent is not None:
            path.append(parent)
            parent = self.parent_of(parent)
        return path[::-1]

    @property
    def depth(self) -> int:
        return max(self.depth_of(n) for n in self.leaves())
