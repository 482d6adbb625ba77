"""
bukzor.singular - Exact arithmetic for singular vectors in the plane

Rational points x = (p, q) carry a Farey lattice whose successive minima
decide how well x approximates its neighbours. On top of that kernel this
library provides:

- Certified comparisons of irrational quantities through rational enclosures
- Best simultaneous approximations of a target, with an exhaustive oracle
- The closed-form dimension bounds for uniform exponent μ
- A verified, capped Cantor tree whose branches converge to singular vectors
- Counting, box-counting, local-dimension and covering diagnostics

Example usage:
    from fractions import Fraction
    from bukzor_singular import TargetPoint, best_sequence, farey_lattice
    from bukzor_singular import make_primitive

    L = farey_lattice(make_primitive(1, 0, 2))
    assert L.lam1_sq == Fraction(1, 4)

    seq = best_sequence(TargetPoint.exact(Fraction(5, 8), 0), qmax=10)
    assert seq.denominators == [1, 2, 3, 8]
"""

# Certified reals
from bukzor_singular.certified import CertifiedReal as CertifiedReal

# Rational geometry
from bukzor_singular.rational_geometry import FareyLattice as FareyLattice
from bukzor_singular.rational_geometry import (
    PrimitiveVector as PrimitiveVector,
)
from bukzor_singular.rational_geometry import farey_lattice as farey_lattice
from bukzor_singular.rational_geometry import in_Q_mu as in_Q_mu
from bukzor_singular.rational_geometry import make_primitive as make_primitive

# Best approximations
from bukzor_singular.best_approx import TargetPoint as TargetPoint
from bukzor_singular.best_approx import best_sequence as best_sequence
from bukzor_singular.best_approx import singular_witness as singular_witness

# Formulas
from bukzor_singular.exponents import lower_bound_dim as lower_bound_dim
from bukzor_singular.exponents import upper_bound_dim as upper_bound_dim

# Cantor trees
from bukzor_singular.cantor.params import TreeParams as TreeParams
from bukzor_singular.cantor.tree import build_tree as build_tree
from bukzor_singular.cantor.tree import extract_point as extract_point

# Errors
from bukzor_singular.errors import SingularError as SingularError

__version__ = "0.1.0"
