"""Exception hierarchy for bukzor.singular.

Bad inputs raise subclasses of both SingularError and ValueError, so callers
that already catch ValueError keep working. Failures that only happen at a
finite height or precision derive from SingularError alone.
"""


class SingularError(Exception):
    """Base class for every error raised by this library."""


class ZeroVector(SingularError, ValueError):
    """All coordinates of an integer vector are zero."""


class NotPrimitive(SingularError, ValueError):
    """A lattice vector is not primitive in the given basis."""


class DomainError(SingularError, ValueError):
    """A parameter lies outside the domain of a formula."""


class DegenerateScales(SingularError, ValueError):
    """Too few distinct scales for a regression."""


class EmptyPath(SingularError, ValueError):
    """A tree path has no nodes."""


class TieBreak(SingularError):
    """Two quantities could not be separated at the maximum precision."""


class EnclosureTooCoarse(SingularError):
    """A target enclosure straddles a decision boundary."""


class IrrationalityExhausted(SingularError):
    """A rational target reached distance zero before the height bound."""


class HeightTooSmall(SingularError):
    """A construction needs a larger height than the node provides."""


class BudgetExceeded(SingularError):
    """An enumeration ran past its configured work budget."""


class DepthInsufficient(SingularError):
    """A tree is too shallow for the requested computation."""
