"""Type definitions for bukzor.singular library."""

from fractions import Fraction
from typing import Literal
from typing import NewType

# Integer data
NodeId = NewType("NodeId", int)  # breadth-first index in a tree

# Integer 3-vector (p1, p2, q) before primitivity is established
IntVector3 = tuple[int, int, int]

# Rational point in the plane
RationalPoint = tuple[Fraction, Fraction]

# Legendre-type classification of a target against a rational point
Classification = Literal["inner", "outer", "between"]

# Search strategies for best approximations
SearchStrategy = Literal["auto", "scan", "tube"]

# Checks understood by the tree verifier
TreeCheck = Literal[
    "nestedness", "disjoint", "packing", "bands", "tiling", "counting"
]
