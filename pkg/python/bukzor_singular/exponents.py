"""Closed-form exponent and dimension formulas.

Everything is exact rational arithmetic when the inputs are rational. The
few irrational quantities (b₀, the packing maximiser, the branch point
√2/2) are CertifiedReal enclosures, and the formulas below accept either
kind of number through plain operator arithmetic.
"""

from __future__ import annotations

import functools
import logging
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from bukzor_singular.certified import CertifiedReal
from bukzor_singular.certified import coerce
from bukzor_singular.config import B_GRID_EXPONENTS
from bukzor_singular.config import MU_STEP
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import TieBreak

logger = logging.getLogger(__name__)

Real = Fraction | CertifiedReal
HALF = Fraction(1, 2)


def _check_mu(mu: Real) -> None:
    if not (mu > HALF and mu < 1):
        raise DomainError(f"μ must lie in (1/2, 1): {mu}")


def _check_mu_b(mu: Real, b: Real) -> None:
    _check_mu(mu)
    if not b > 0:
        raise DomainError(f"b must be positive: {b}")


def _below_branch_point(mu: Real) -> bool:
    """μ² < 1/2, decided exactly or by certified comparison."""
    return coerce(mu * mu) < HALF


def mu_grid(step: Fraction = MU_STEP) -> list[Fraction]:
    """Interior points of (1/2, 1) spaced by ``step``."""
    n = int(HALF / step)
    return [HALF + k * step for k in range(1, n)]


def b_grid(exponents: tuple[int, int] = B_GRID_EXPONENTS) -> list[Fraction]:
    lo, hi = exponents
    return [Fraction(2) ** k for k in range(lo, hi + 1)]


# Hausdorff dimension bounds


def upper_bound_dim(mu: Real) -> CertifiedReal:
    """(3−2μ)(1−μ)/(μ²−μ+1) up to μ = √2/2, then 2(1−μ)."""
    _check_mu(mu)
    if coerce(mu * mu) <= HALF:
        value = (3 - 2 * mu) * (1 - mu) / (mu * mu - mu + 1)
    else:
        value = 2 * (1 - mu)
    return coerce(value)


def s1(mu: Real, b: Real) -> Real:
    """Lower-bound exponent of the (μ, b) Cantor family."""
    _check_mu_b(mu, b)
    num = 2 * b * b + 2 * b * mu + b + (2 - mu) * (2 * mu - 1)
    return (1 - mu) * num / ((b + 2 * mu - 1) * (mu * mu - mu + b + 1))


def s2(mu: Real, b: Real) -> Real:
    """Second exponent of the (μ, b) family; always above s1."""
    _check_mu_b(mu, b)
    return (-2 * mu * mu + 5 * mu + b - 2) / (2 * mu + b * mu - 1)


def s2_minus_s1_factored(mu: Real, b: Real) -> Real:
    """s2 − s1 in factored form; every factor is positive."""
    _check_mu_b(mu, b)
    quad = (
        (2 * mu * mu - 2 * mu + 1) * b * b
        + (4 * mu * mu - 2 * mu) * b
        + mu * (2 - mu) * (2 * mu - 1) ** 2
    )
    den = (b - mu + mu * mu + 1) * (b + 2 * mu - 1) * (2 * mu + b * mu - 1)
    return (b + mu) * quad / den


def s1_beta(mu: Real, beta: Real) -> Real:
    """s1 under b = β(2μ−1); tends to 4/3 as μ → 1/2 then β → ∞."""
    return s1(mu, beta * (2 * mu - 1))


def derivative_numerator(mu: Real, b: Real) -> Real:
    """Numerator of ds1/db; its sign is the sign of the derivative."""
    return (1 - mu) * (
        (2 * mu * mu - 1) * b * b
        + (8 * mu**3 - 8 * mu * mu + 2 * mu) * b
        + (6 * mu**4 - 7 * mu**3 + 3 * mu - 1)
    )


def _require_sign_change(mu: Fraction, root: CertifiedReal) -> None:
    lo = derivative_numerator(mu, root.lower)
    hi = derivative_numerator(mu, root.upper)
    if lo * hi > 0:
        raise TieBreak(f"b₀ enclosure misses the sign change at μ = {mu}")


def b0(mu: Fraction) -> CertifiedReal:
    """The maximiser of s1(μ, ·), defined for μ < √2/2."""
    _check_mu(mu)
    if not _below_branch_point(mu):
        raise DomainError(f"b₀ needs μ < √2/2, got μ = {mu}")
    w = (1 - mu) ** 3 * (2 * mu - 1) * (2 * mu - 2 * mu * mu + 1)
    root = (mu - 4 * mu * mu + 4 * mu**3 + CertifiedReal.sqrt(w)) / (
        1 - 2 * mu * mu
    )
    _require_sign_change(mu, root)
    logger.debug("b₀(%s) ∈ [%s, %s]", mu, float(root.lower), float(root.upper))
    return root


def lower_bound_dim(mu: Fraction) -> CertifiedReal:
    """s1(μ, b₀) below √2/2; the b → ∞ limit 2(1−μ) above."""
    _check_mu(mu)
    if _below_branch_point(mu):
        return coerce(s1(mu, b0(mu)))
    return CertifiedReal.exact(2 * (1 - mu))


# Packing dimension


def packing(mu: Real, b: Real) -> Real:
    """p(μ, b), the packing exponent of the (μ, b) family."""
    _check_mu_b(mu, b)
    num = 2 * b * b + (2 * mu + 1) * b + (2 - mu) * (2 * mu - 1)
    return num / ((2 * b + mu + 1) * (b + 2 * mu - 1))


def packing_profile(
    mu: Fraction, bs: Iterable[Fraction]
) -> list[tuple[Fraction, Fraction]]:
    return [(b, Fraction(packing(mu, b))) for b in bs]


@dataclass(frozen=True, slots=True)
class PackingBound:
    """sup_b p(μ, b), with the maximiser when the sup is attained."""

    mu: Fraction
    value: CertifiedReal
    argmax: CertifiedReal | None

    @property
    def attained(self) -> bool:
        return self.argmax is not None


def packing_bound(mu: Fraction) -> PackingBound:
    """Supremum of p(μ, ·).

    The derivative numerator is −2(2−3μ)b² + 4(2μ−1)²b + (2μ−1)(7μ²−8μ+3).
    Its constant term is positive, so for μ < 2/3 it has one positive root,
    the maximiser. For μ ≥ 2/3 p increases towards the limit 1.
    """
    _check_mu(mu)
    if mu >= Fraction(2, 3):
        return PackingBound(mu, CertifiedReal.exact(1), None)
    lead = 2 - 3 * mu
    lin = 4 * (2 * mu - 1) ** 2
    const = (2 * mu - 1) * (7 * mu * mu - 8 * mu + 3)
    disc = lin * lin + 8 * lead * const
    argmax = (lin + CertifiedReal.sqrt(disc)) / (4 * lead)
    return PackingBound(mu, coerce(packing(mu, argmax)), argmax)


def packing_threshold(
    lo: Fraction = Fraction(51, 100),
    hi: Fraction = Fraction(7, 10),
    tolerance: Fraction = Fraction(1, 10**6),
) -> CertifiedReal:
    """Where the packing lower bound overtakes the Hausdorff upper bound.

    Bisection on μ of sup_b p(μ, b) − upper_bound_dim(μ), which is negative
    at ``lo`` and positive at ``hi``.
    """

    def gap(mu: Fraction) -> CertifiedReal:
        return packing_bound(mu).value - upper_bound_dim(mu)

    if not (gap(lo) < 0 and gap(hi) > 0):
        raise DomainError(f"no sign change of the packing gap on [{lo}, {hi}]")
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    logger.info("packing threshold in [%s, %s]", float(lo), float(hi))
    return CertifiedReal(lo, hi)


# Tree exponents


@dataclass(frozen=True, slots=True)
class NodeExponents:
    """Height and radius exponents of one generation of the Cantor tree.

    Radii are |x|^{r0} for B(x), |x|^{h}, |x|^{v} for the intermediate
    balls and |x|^{r2}, |x|^{r3} for the packing balls; heights grow as
    |y| ≍ |x|^{e_y}, |z| ≍ |x|^{e_z}; card σ(x) ≍ |x|^{n_x}.
    """

    mu: Fraction
    b: Fraction
    r0: Fraction
    e_y: Fraction
    e_z: Fraction
    h: Fraction
    v: Fraction
    r1: Fraction
    r2: Fraction
    r3: Fraction
    n_x: Fraction
    d1: Fraction
    e1: Fraction

    @property
    def ordered(self) -> bool:
        return self.r0 > self.h > self.v > self.r2 > self.r3

    def as_dict(self) -> dict[str, Fraction]:
        names = "r0 e_y e_z h v r1 r2 r3 n_x d1 e1".split()
        return {name: getattr(self, name) for name in names}


@functools.lru_cache(maxsize=1024)
def node_exponents(mu: Fraction, b: Fraction) -> NodeExponents:
    _check_mu_b(mu, b)
    k = (1 - mu) * (b + 1)
    e_y = (mu + b) / k
    r0 = -(mu * mu - mu + b + 1) / k
    v = -(1 + mu) * (b + mu) / k
    return NodeExponents(
        mu=mu,
        b=b,
        r0=r0,
        e_y=e_y,
        e_z=(1 + b) * e_y,
        h=-(2 - mu) * (b + mu) / k,
        v=v,
        r1=v,
        r2=-(mu + 1 + 2 * b) * (b + mu) / k,
        r3=(mu + b) / (1 - mu) * r0,
        n_x=(2 * b * b + 2 * b * mu + b + (2 * mu - 1) * (2 - mu)) / k,
        d1=2 * b * e_y,
        e1=2 * (mu - 1) / (1 + b) + e_y,
    )


def remark_tau(mu: Fraction, b: Fraction) -> Fraction:
    """τ = |r0| − 1, the extra approximation order of the (μ, b) family."""
    _check_mu_b(mu, b)
    return (mu * mu - mu + b + 1) / ((1 - mu) * (b + 1)) - 1


def remark_tau_bound(mu: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    """(τ, s1): dimension s1 is reached inside the τ-refined set."""
    return remark_tau(mu, b), Fraction(s1(mu, b))


# Reference bounds and transference


@dataclass(frozen=True, slots=True)
class BakerBounds:
    tau: Fraction
    lower: Fraction
    baker_upper: Fraction
    dodson_upper: Fraction
    laurent_upper: Fraction


def baker_bounds(tau: Fraction) -> BakerBounds:
    """Earlier bounds for the τ-singular set, for plotting beside ours."""
    if not tau > 2:
        raise DomainError(f"τ must exceed 2: {tau}")
    q = tau * tau - tau + 1
    return BakerBounds(
        tau=tau,
        lower=2 / tau,
        baker_upper=6 / (tau + 1),
        dodson_upper=3 * tau / q,
        laurent_upper=(2 * tau + 2) / q,
    )


def dodson_bound_mu(mu: Fraction) -> Fraction:
    """Dodson's bound at τ = 1/(1−μ): 3(1−μ)/(μ²−μ+1)."""
    if not HALF <= mu < 1:
        raise DomainError(f"μ must lie in [1/2, 1): {mu}")
    return 3 * (1 - mu) / (mu * mu - mu + 1)


def dodson_threshold() -> CertifiedReal:
    """Root of 3(1−μ)/(μ²−μ+1) = 4/3, i.e. (√105 − 5)/8."""
    return (CertifiedReal.sqrt(105) - 5) / 8


def jarnik_ordinary_bound(mu: Fraction) -> Fraction:
    _check_mu(mu)
    return mu * mu / (1 - mu)


def covering_radius_exponent(mu: Fraction) -> Fraction:
    return 1 + jarnik_ordinary_bound(mu)


def jarnik_transfer(w: Fraction | None) -> Fraction:
    """1 − 1/w for a linear-form exponent w ≥ 2; None stands for +∞."""
    if w is None:
        return Fraction(1)
    if w < 2:
        raise DomainError(f"linear-form exponent must be >= 2: {w}")
    return 1 - 1 / w


def jarnik_inverse(u: Fraction) -> Fraction | None:
    """Inverse of jarnik_transfer on [1/2, 1]; 1 maps to +∞ (None)."""
    if not HALF <= u <= 1:
        raise DomainError(f"simultaneous exponent must lie in [1/2, 1]: {u}")
    if u == 1:
        return None
    return 1 / (1 - u)


# Upper-bound covering argument


def upper_gamma(mu: Fraction) -> tuple[Fraction, Fraction]:
    """(γ, t_crit) balancing the covering by mixed balls below √2/2."""
    _check_mu(mu)
    gamma = (1 - 2 * mu * mu) / (mu * (1 - mu) * (3 - 2 * mu))
    if gamma <= 0:
        raise DomainError(f"γ needs μ < √2/2, got μ = {mu}")
    return gamma, (3 - 2 * mu) / (1 - mu + mu * mu)


@dataclass(frozen=True, slots=True)
class CoveringExponents:
    """Exponents of the sum over Q_μ bounding the s-cost of a covering.

    At t = t_crit with the γ of upper_gamma, b = 2, A = 0 and B − b = 0
    all hold with equality.
    """

    a: Fraction
    b: Fraction
    A_minus_a: Fraction
    B_minus_b: Fraction


def covering_exponents(
    mu: Fraction, t: Fraction, gamma: Fraction = Fraction(0)
) -> CoveringExponents:
    """Exponents for balls of radius λ₂^{-(1−γ)μ}|x|^{-((μ−1)μγ+1)}."""
    _check_mu(mu)
    a = (1 - gamma) * mu * t
    b = (1 + gamma * (mu - 1) * mu) * t
    A = (b - 1) / (1 - mu) - a - 2
    B = mu * (b - 1) / (1 - mu) - a - 1 + b
    return CoveringExponents(a, b, A - a, B - b)


# Tabulation


@dataclass(frozen=True, slots=True)
class FormulaRow:
    mu: Fraction
    lower: CertifiedReal
    upper: CertifiedReal
    packing: CertifiedReal
    b0: CertifiedReal | None
    gamma: Fraction | None


def formula_row(mu: Fraction) -> FormulaRow:
    below = _below_branch_point(mu)
    return FormulaRow(
        mu=mu,
        lower=lower_bound_dim(mu),
        upper=upper_bound_dim(mu),
        packing=packing_bound(mu).value,
        b0=b0(mu) if below else None,
        gamma=upper_gamma(mu)[0] if below else None,
    )
