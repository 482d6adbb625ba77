"""Rendering of results as JSON-ready dicts, CSV rows and text lines.

Integers and rationals are written as decimal strings, since heights pass
64 bits after a few generations. Certified values are written as their
midpoint to 30 significant digits next to the enclosure width.
"""

from collections.abc import Iterable
from decimal import Decimal
from decimal import localcontext
from fractions import Fraction
from typing import Any

import mpmath

from bukzor_singular.best_approx import Bai3Report
from bukzor_singular.best_approx import BestApproxSequence
from bukzor_singular.best_approx import DecayReport
from bukzor_singular.best_approx import ExponentProfile
from bukzor_singular.best_approx import WitnessReport
from bukzor_singular.cantor.tiling import Tiling
from bukzor_singular.cantor.tiling import TilingReport
from bukzor_singular.cantor.tree import Check
from bukzor_singular.cantor.tree import NodeReport
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.dimension_lab import BoxCount
from bukzor_singular.dimension_lab import CountingReport
from bukzor_singular.dimension_lab import CoveringAudit
from bukzor_singular.dimension_lab import LocalDimension
from bukzor_singular.dimension_lab import ShellRow
from bukzor_singular.exponents import FormulaRow
from bukzor_singular.rational_geometry import FareyLattice
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import Rational2Vector
from bukzor_singular.types import NodeId
from bukzor_singular.types import RationalPoint

DIGITS = 30

FORMULA_COLUMNS = (
    "mu",
    "upper",
    "upper_width",
    "lower",
    "lower_width",
    "packing",
    "packing_width",
    "b0",
    "b0_width",
    "gamma",
    "tau",
)


def decimal_str(value: Fraction, digits: int = DIGITS) -> str:
    """*value* to *digits* significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def certified(value: CertifiedReal) -> dict[str, str]:
    out = {
        "value": str(value.to_decimal(DIGITS)),
        "width": decimal_str(value.width, 3),
    }
    if value.is_exact:
        out["exact"] = str(value.lower)
    return out


def mpf_str(value: Any) -> str:
    return mpmath.nstr(value, DIGITS)


def vector(v: PrimitiveVector) -> list[str]:
    return [str(c) for c in v.as_tuple()]


def point(p: RationalPoint) -> list[str]:
    return [str(p[0]), str(p[1])]


def plane_vector(v: Rational2Vector) -> list[str]:
    return point(v.as_tuple())


# Lattices and best approximations


def lattice(L: FareyLattice) -> dict[str, Any]:
    n1, n2 = L.normalized_minima()
    return {
        "x": vector(L.owner),
        "u1": plane_vector(L.u1),
        "u2": plane_vector(L.u2),
        "w1": [str(c) for c in L.w1],
        "w2": [str(c) for c in L.w2],
        "lam1_sq": str(L.lam1_sq),
        "lam2_sq": str(L.lam2_sq),
        "lambda1": certified(L.lambda1()),
        "lambda2": certified(L.lambda2()),
        "normalized": [certified(n1), certified(n2)],
        "covolume": str(L.covolume),
        "covolume_ok": L.covolume == Fraction(1, L.owner.q),
        "minkowski_ok": L.minkowski_ok(),
        "gauss_reduced": L.is_gauss_reduced(),
    }


def sequence(seq: BestApproxSequence) -> dict[str, Any]:
    return {
        "theta": {
            "center": point(seq.theta.center),
            "radius": str(seq.theta.radius),
        },
        "qmax": str(seq.qmax),
        "terminal": seq.terminal,
        "records": [
            {"x": vector(r.x), "q": str(r.q), "rn_sq": str(r.rn_sq)}
            for r in seq.records
        ],
    }


def bai3(report: Bai3Report) -> dict[str, Any]:
    return {
        "ok": report.ok,
        "checked": report.checked,
        "violations": report.violations,
    }


def witness(report: WitnessReport) -> dict[str, Any]:
    return {
        "mu": str(report.mu),
        "passed": report.passed,
        "degenerate": report.degenerate,
        "failures": report.failures,
        "rows": [
            {
                "n": row.n,
                "q": str(row.q),
                "lambda1_ok": row.lambda1_ok,
                "lower_ok": row.lower_ok,
                "upper_ok": row.upper_ok,
                "comparable_ok": row.comparable_ok,
            }
            for row in report.rows
        ],
    }


def decay(report: DecayReport) -> dict[str, Any]:
    return {
        "mu": str(report.mu),
        "ok": report.ok,
        "checked": report.checked,
        "violations": [str(q) for q in report.violations],
    }


def profile(result: ExponentProfile) -> dict[str, Any]:
    tail = result.tail_infimum
    return {
        "tail_infimum": None if tail is None else certified(tail),
        "tail_infinite": result.tail_infinite,
        "rows": [
            {
                "Q": str(row.Q),
                "dist_sq": str(row.dist_sq),
                "estimate": (
                    None if row.estimate is None else certified(row.estimate)
                ),
                "infinite": row.infinite,
            }
            for row in result.rows
        ],
    }


# Formulas


def _optional(value: CertifiedReal | None) -> tuple[str, str]:
    if value is None:
        return "", ""
    return str(value.to_decimal(DIGITS)), decimal_str(value.width, 3)


def formula_csv(row: FormulaRow, tau: Fraction | None) -> dict[str, str]:
    """One CSV row; b₀, γ and τ are blank above √2/2."""
    upper, upper_width = _optional(row.upper)
    lower, lower_width = _optional(row.lower)
    packing, packing_width = _optional(row.packing)
    b0, b0_width = _optional(row.b0)
    return {
        "mu": decimal_str(row.mu),
        "upper": upper,
        "upper_width": upper_width,
        "lower": lower,
        "lower_width": lower_width,
        "packing": packing,
        "packing_width": packing_width,
        "b0": b0,
        "b0_width": b0_width,
        "gamma": "" if row.gamma is None else decimal_str(row.gamma),
        "tau": "" if tau is None else decimal_str(tau),
    }


# Trees


def check(c: Check) -> dict[str, Any]:
    out: dict[str, Any] = {"name": c.name, "ok": c.ok}
    if not c.structural:
        out["band"] = True
    if c.exempt:
        out["exempt"] = True
    if c.detail:
        out["detail"] = c.detail
    return out


def node_report(report: NodeReport) -> dict[str, Any]:
    return {
        "node": report.node,
        "ok": report.ok,
        "bands_ok": report.bands_ok,
        "checks": [check(c) for c in report.checks],
    }


def tiling_report(
    node: NodeId, tiling: Tiling, report: TilingReport
) -> dict[str, Any]:
    return {
        "node": node,
        "ok": report.ok,
        "cells": len(tiling.cells),
        "truncated": tiling.truncated,
        "H": certified(tiling.H),
        "V": certified(tiling.V),
        "x_h": certified(tiling.x_h),
        "x_v": certified(tiling.x_v),
        "rho": None if report.rho is None else certified(report.rho),
        "checks": [check(c) for c in report.checks],
    }


# Dimension diagnostics


def counting(node: NodeId, report: CountingReport) -> dict[str, Any]:
    return {
        "node": node,
        "s": str(report.s),
        "ok": report.ok,
        "hypotheses_ok": report.hypotheses_ok,
        "hypotheses": [check(c) for c in report.hypotheses],
        "rows": [
            {
                "r": str(row.r),
                "count": row.count,
                "f": certified(row.f),
                "bound": certified(row.bound),
                "case": row.case,
                "g": certified(row.g),
                "violated": row.violated,
            }
            for row in report.rows
        ],
    }


def box_count(result: BoxCount) -> dict[str, Any]:
    lo, hi = result.band()
    return {
        "scales": [str(s) for s in result.scales],
        "counts": list(result.counts),
        "slope": result.slope,
        "stderr": result.stderr,
        "band": [lo, hi],
    }


def local(result: LocalDimension) -> dict[str, Any]:
    return {
        "s": str(result.s),
        "tolerance": str(result.tolerance),
        "quantiles": result.quantiles,
        "share_below": result.share_below,
        "flagged": result.flagged,
        "rows": [
            {"node": node, "ratio": certified(ratio)}
            for node, ratio in result.rows
        ],
    }


def shells(rows: Iterable[ShellRow]) -> list[dict[str, Any]]:
    return [
        {
            "lo": str(row.lo),
            "hi": str(row.hi),
            "terms": row.terms,
            "mass": mpf_str(row.mass),
            "cumulative": mpf_str(row.cumulative),
            "decrement": row.decrement,
        }
        for row in rows
    ]


def audit(result: CoveringAudit, rows: Iterable[ShellRow]) -> dict[str, Any]:
    e = result.exponents
    return {
        "x": vector(result.x),
        "mu": str(result.mu),
        "s": str(result.s),
        "gamma": str(result.gamma),
        "cutoff": str(result.cutoff),
        "e_count": result.e_count,
        "terms": len(result.terms),
        "ratio": mpf_str(result.ratio),
        "partial_sum": mpf_str(result.partial_sum),
        "exponents": {
            "a": str(e.a),
            "b": str(e.b),
            "A_minus_a": str(e.A_minus_a),
            "B_minus_b": str(e.B_minus_b),
        },
        "summable": result.summable,
        "predicted_decay": str(result.predicted_decay),
        "shells": shells(rows),
    }
