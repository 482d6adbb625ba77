"""Defaults and run provenance."""

from __future__ import annotations

import datetime
import json
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from typing import Any

SCHEMA_VERSION = 1

# Certified arithmetic
DEFAULT_PRECISION = 64  # bits
MAX_PRECISION = 2**14  # bits

# Verifier bands
BAND = Fraction(2**6)
C0_TILING = Fraction(2**6)
PACKING_K = Fraction(1, 2)  # B(x) must sit inside B(x̂, k·r′(x))
BAND_SCALE = 2**5  # λ₁ centers are divided by it, λ₂ centers multiplied

# Formula grids
MU_STEP = Fraction(1, 200)
B_GRID_EXPONENTS = (-10, 20)  # log2 range of the b-grid
AUTO_B_FALLBACK = Fraction(32)

# Tree construction
DEFAULT_CAP = 8
DEFAULT_MIN_HEIGHT = 2
CALIBRATION_SAFETY = Fraction(1, 4)
D1_AREA_ESTIMATE_LIMIT = 10**5
ESTIMATE_SAMPLES = 256  # lines or rows sampled past the exact limit
NODE_BUDGET = 10**5
TILING_LIMIT = 512  # cells built per node unless asked for more

# Best approximations
SCAN_LIMIT = 10**5
TUBE_BUDGET = 10**6

# Dimension lab
AUDIT_BUDGET = 10**6


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Everything needed to reproduce one CLI run."""

    command: str
    params: dict[str, Any] = field(default_factory=dict[str, Any])
    precision: int = MAX_PRECISION  # refinement ceiling in bits
    jobs: int = 1
    deterministic: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if not DEFAULT_PRECISION <= self.precision <= MAX_PRECISION:
            raise ValueError(f"Precision out of range: {self.precision} bits")
        if self.jobs < 1:
            raise ValueError(f"Job count must be positive: {self.jobs}")

    def provenance(self) -> dict[str, Any]:
        """Header embedded in every artifact.

        The timestamp is the only field that varies between identical runs.
        """
        from bukzor_singular import __version__

        return {
            "schema_version": SCHEMA_VERSION,
            "library": "bukzor-singular",
            "version": __version__,
            "config": asdict(self),
            "generated": _timestamp(),
        }

    def dumps(self, payload: dict[str, Any]) -> str:
        """Render *payload* as JSON with the provenance header first.

        The ``generated`` line is printed on its own so byte comparisons can
        drop it.
        """
        document = {"provenance": self.provenance(), **payload}
        return json.dumps(document, indent=2, sort_keys=True)


def _timestamp() -> str:
    return datetime.datetime.now(datetime.UTC).isoformat(timespec="seconds")
