"""Parameters of the Cantor tree."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from dataclasses import replace
from fractions import Fraction
from typing import Any
from typing import Literal
from typing import Self

from bukzor_singular.certified import CertifiedReal
from bukzor_singular.config import AUTO_B_FALLBACK
from bukzor_singular.config import BAND
from bukzor_singular.config import DEFAULT_CAP
from bukzor_singular.config import DEFAULT_MIN_HEIGHT
from bukzor_singular.errors import DomainError
from bukzor_singular.exponents import NodeExponents
from bukzor_singular.exponents import b0
from bukzor_singular.exponents import node_exponents

# b₀ is irrational; the tree runs on this rational rounding of it.
AUTO_B_DENOMINATOR = 1024

_CONSTANTS = ("c1", "c2", "c3", "c4")


def resolve_b(mu: Fraction, b: Fraction | Literal["auto"]) -> Fraction:
    """A rational b; "auto" is b₀(μ) below √2/2 and a fixed large b above."""
    if b != "auto":
        return Fraction(b)
    if 2 * mu * mu < 1:
        scaled = b0(mu).midpoint * AUTO_B_DENOMINATOR
        return Fraction(round(scaled), AUTO_B_DENOMINATOR)
    return AUTO_B_FALLBACK


@dataclass(frozen=True, slots=True)
class TreeParams:
    """Exponent pair (μ, b), scale constants and selection limits.

    c1 bounds d(ŷ, ẑ) in D₁(y); c2 scales the balls B(x); c3 scales the
    sibling separation R₂; c4 scales the packing balls B′(x). The defaults
    are provisional until ``calibrate`` freezes them for a root.
    """

    mu: Fraction
    b: Fraction
    c1: Fraction = Fraction(1, 4)
    c2: Fraction = Fraction(1)
    c3: Fraction = Fraction(1)
    c4: Fraction = Fraction(1)
    min_height: int = DEFAULT_MIN_HEIGHT
    cap: int = DEFAULT_CAP
    band: Fraction = BAND
    calibrated: bool = False

    def __post_init__(self) -> None:
        if not Fraction(1, 2) < self.mu < 1:
            raise DomainError(f"μ must lie in (1/2, 1): {self.mu}")
        if self.b <= 0:
            raise DomainError(f"b must be positive: {self.b}")
        if not 0 < self.c1 <= Fraction(1, 4):
            raise ValueError(f"c1 must lie in (0, 1/4]: {self.c1}")
        for name in _CONSTANTS[1:]:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_height < 1:
            raise ValueError(f"Minimum height must be >= 1: {self.min_height}")
        if self.cap < 1:
            raise ValueError(f"Child cap must be >= 1: {self.cap}")
        if self.band < 1:
            raise ValueError(f"Band factor must be >= 1: {self.band}")

    @classmethod
    def of(
        cls, mu: Fraction, b: Fraction | Literal["auto"], **kwargs: Any
    ) -> Self:
        return cls(Fraction(mu), resolve_b(Fraction(mu), b), **kwargs)

    def frozen(self, **constants: Fraction) -> TreeParams:
        """Copy with calibrated constants."""
        return replace(self, calibrated=True, **constants)

    @property
    def exps(self) -> NodeExponents:
        return node_exponents(self.mu, self.b)

    @property
    def c0(self) -> CertifiedReal:
        """32^{1/(1−μ)}."""
        return _c0(self.mu)

    @property
    def packing_exponent(self) -> Fraction:
        return -(self.mu + 1 + 2 * self.b) / (1 + self.b)

    @property
    def witnesses(self) -> int:
        """E₁ witnesses used by the capped selection, two children each."""
        return (self.cap + 1) // 2

    def ball_radius(self, height: int) -> CertifiedReal:
        """c2·|x|^{r0}."""
        return self.c2 * CertifiedReal.power(height, self.exps.r0)

    def packing_radius(self, height: int) -> CertifiedReal:
        """c4·|x|^{−(μ+1+2b)/(1+b)}."""
        return self.c4 * CertifiedReal.power(height, self.packing_exponent)

    def separation(self, height: int) -> CertifiedReal:
        """R₂ = c3·|x|^{r2}."""
        return self.c3 * CertifiedReal.power(height, self.exps.r2)

    def y_window(self, alpha_sq: Fraction, height: int) -> CertifiedReal:
        """Lower end c0·(‖α‖·|x|)^{1/(1−μ)} of the E₁ height window."""
        base = 1024 * alpha_sq * height * height
        return CertifiedReal.power(base, 1 / (2 * (1 - self.mu)))

    def z_window(self, y_height: int) -> CertifiedReal:
        """|y|^{1+b}; D₁(y) heights lie in [½·this, this]."""
        return CertifiedReal.power(y_height, 1 + self.b)

    def as_dict(self) -> dict[str, Any]:
        return {
            "mu": str(self.mu),
            "b": str(self.b),
            **{name: str(getattr(self, name)) for name in _CONSTANTS},
            "min_height": self.min_height,
            "cap": self.cap,
            "band": str(self.band),
            "calibrated": self.calibrated,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        fractions = {
            name: Fraction(data[name])
            for name in ("mu", "b", "band", *_CONSTANTS)
        }
        return cls(
            min_height=int(data["min_height"]),
            cap=int(data["cap"]),
            calibrated=bool(data["calibrated"]),
            **fractions,
        )


@functools.lru_cache(maxsize=64)
def _c0(mu: Fraction) -> CertifiedReal:
    return CertifiedReal.power(32, 1 / (1 - mu))
