#!/usr/bin/env -S uv run pytest
"""Tests for the closed-form exponent and dimension formulas."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import bukzor_singular.exponents as M  # module under test
from bukzor_singular.certified import CertifiedReal
from bukzor_singular.certified import coerce
from bukzor_singular.errors import DomainError
from bukzor_singular.errors import TieBreak

F = Fraction
MU = F(3, 5)

mus = st.integers(1, 99).map(lambda k: F(1, 2) + F(k, 200))
bs = st.fractions(min_value=F(1, 1000), max_value=1000)


def _close(value: CertifiedReal | Fraction, target: Fraction, tol: Fraction):
    v = coerce(value)
    return target - tol < v.lower and v.upper < target + tol


def test_upper_bound_examples():
    """18/19 at μ = 0.6 and 2(1−μ) = 0.2 at μ = 0.9."""
    assert M.upper_bound_dim(MU).lower == F(18, 19)
    assert M.upper_bound_dim(F(9, 10)).lower == F(1, 5)


def test_upper_bound_continuous_at_branch_point():
    """Both branches give 2 − √2 at μ = √2/2."""
    mu = CertifiedReal.sqrt(F(1, 2))
    diff = M.upper_bound_dim(mu) - (2 - CertifiedReal.sqrt(2))
    assert -F(1, 10**12) < diff.lower
    assert diff.upper < F(1, 10**12)


def test_domain_errors():
    """μ outside (1/2, 1) is rejected everywhere."""
    for bad in (F(1, 2), F(1), F(2)):
        with pytest.raises(DomainError, match="μ"):
            M.upper_bound_dim(bad)
    with pytest.raises(DomainError, match="b must be positive"):
        M.s1(MU, F(0))


def test_s1_large_b_limit():
    """s1(0.6, 10⁶) is within 10⁻⁴ of 2(1−μ) = 0.8."""
    assert abs(M.s1(MU, F(10**6)) - F(4, 5)) < F(1, 10**4)


def test_s1_near_maximiser():
    """s1(0.6, 0.57729) ≈ 0.85297."""
    assert abs(M.s1(MU, F(57729, 10**5)) - F(85297, 10**5)) < F(1, 10**4)


def test_s1_beta_tends_to_four_thirds():
    """b = β(2μ−1) with μ → 1/2 and large β gives s1 ≈ 4/3."""
    mu = F(1, 2) + F(1, 10**9)
    assert abs(M.s1_beta(mu, F(10**4)) - F(4, 3)) < F(1, 10**3)


@given(mus, bs)
def test_s2_minus_s1_factorisation(mu: Fraction, b: Fraction):
    """The factored gap equals s2 − s1 exactly and is positive."""
    gap = M.s2(mu, b) - M.s1(mu, b)
    assert gap == M.s2_minus_s1_factored(mu, b)
    assert gap > 0


def test_b0_at_six_tenths():
    """b₀(0.6) ≈ 0.57729 and the numerator changes sign across it."""
    root = M.b0(MU)
    assert _close(root, F(57729, 10**5), F(1, 10**4))
    assert M.derivative_numerator(MU, F(57, 100)) > 0
    assert M.derivative_numerator(MU, F(58, 100)) < 0


def test_b0_is_grid_maximiser():
    """s1(0.51, b₀) beats s1 on a grid from b₀/4 to 4b₀."""
    mu = F(51, 100)
    root = M.b0(mu)
    best = M.lower_bound_dim(mu)
    assert root.lower > 0
    for k in range(1, 17):
        if k == 4:
            continue
        b = root.midpoint * F(k, 4)
        assert CertifiedReal.exact(M.s1(mu, b)) < best


def test_b0_domain():
    """b₀ is undefined past √2/2."""
    with pytest.raises(DomainError, match="√2/2"):
        M.b0(F(71, 100))


def test_b0_enclosure_must_bracket_the_root():
    """An enclosure on one side of the sign change is refused."""
    M._require_sign_change(MU, M.b0(MU))
    with pytest.raises(TieBreak, match="sign change"):
        M._require_sign_change(MU, CertifiedReal.exact(F(1)))


def test_lower_bound_examples():
    """0.4 at μ = 0.8; ≈ 0.85297 at μ = 0.6, above 2(1−μ)."""
    assert M.lower_bound_dim(F(4, 5)).lower == F(2, 5)
    low = M.lower_bound_dim(MU)
    assert _close(low, F(85297, 10**5), F(1, 10**4))
    assert low > F(4, 5)


def test_lower_bound_near_half():
    """The lower bound approaches 4/3 as μ → 1/2."""
    low = M.lower_bound_dim(F(1, 2) + F(1, 10**6))
    assert _close(low, F(4, 3), F(1, 100))


def test_bounds_ordered_on_grid():
    """lower < upper below √2/2, equal above."""
    for mu in M.mu_grid():
        low, up = M.lower_bound_dim(mu), M.upper_bound_dim(mu)
        if mu * mu < F(1, 2):
            assert low < up
        else:
            assert low.lower == up.lower == 2 * (1 - mu)


def test_s1_increasing_above_branch_point():
    """For μ > √2/2 the numerator is positive and s1 increases in b."""
    mu = F(4, 5)
    grid = M.b_grid()
    for b in grid:
        assert M.derivative_numerator(mu, b) > 0
    values = [M.s1(mu, b) for b in grid]
    assert values == sorted(values)


def test_packing_examples():
    """p(0.55, 10³) > 1; the μ = 0.8 profile rises towards 1."""
    assert M.packing(F(55, 100), F(1000)) > 1
    profile = M.packing_profile(F(4, 5), [F(1), F(3), F(10), F(30)])
    expected = [F(875, 1000), F(944, 1000), F(981, 1000), F(994, 1000)]
    for (_, p), e in zip(profile, expected):
        assert abs(p - e) < F(1, 1000)
    bound = M.packing_bound(F(4, 5))
    assert not bound.attained
    assert bound.value.lower == 1


def test_packing_attained_below_two_thirds():
    """At μ = 0.6 the supremum is an interior maximum above 1."""
    bound = M.packing_bound(MU)
    assert bound.attained
    assert bound.value > 1
    for b in M.b_grid():
        assert CertifiedReal.exact(M.packing(MU, b)) < bound.value


def test_packing_threshold():
    """The packing bound overtakes the Hausdorff upper bound near 0.565."""
    crossing = M.packing_threshold()
    assert F(56, 100) < crossing.lower
    assert crossing.upper < F(57, 100)


def test_node_exponents_at_six_tenths():
    """e_y = 2, r0 = −2.2, n_x = 5.6 at μ = 0.6, b = 1."""
    e = M.node_exponents(MU, F(1))
    assert e.e_y == 2
    assert e.r0 == F(-11, 5)
    assert e.n_x == F(28, 5)
    assert (e.h, e.v) == (F(-14, 5), F(-16, 5))
    assert (e.r2, e.r3) == (F(-36, 5), F(-44, 5))
    assert e.e_z == 4
    assert (e.d1, e.e1) == (4, F(8, 5))


@given(mus, bs)
def test_node_exponent_identities(mu: Fraction, b: Fraction):
    """Ordering of radii, r3/r0 = (μ+b)/(1−μ), d1 + e1 = n_x, τ = |r0| − 1."""
    e = M.node_exponents(mu, b)
    assert e.ordered
    assert e.r1 == e.v
    assert e.r3 / e.r0 == (mu + b) / (1 - mu)
    assert e.d1 + e.e1 == e.n_x
    assert M.remark_tau(mu, b) == -e.r0 - 1


def test_remark_tau():
    """τ(0.6, 1) = 1.2 and τ → μ/(1−μ) as b → ∞."""
    assert M.remark_tau(MU, F(1)) == F(6, 5)
    limit = MU / (1 - MU)
    assert abs(M.remark_tau(MU, F(10**6)) - limit) < F(1, 10**5)
    tau, s = M.remark_tau_bound(MU, F(1))
    assert (tau, s) == (F(6, 5), M.s1(MU, F(1)))


def test_baker_bounds():
    """τ = 3 gives 2/3, 3/2, 9/7 and 8/7."""
    bb = M.baker_bounds(F(3))
    assert (bb.lower, bb.baker_upper) == (F(2, 3), F(3, 2))
    assert (bb.dodson_upper, bb.laurent_upper) == (F(9, 7), F(8, 7))
    with pytest.raises(DomainError, match="τ"):
        M.baker_bounds(F(2))


def test_baker_bounds_vanish():
    """All reference bounds tend to 0 as τ grows."""
    bb = M.baker_bounds(F(10**9))
    assert max(bb.lower, bb.baker_upper, bb.dodson_upper) < F(1, 10**8)


def test_dodson_transfer():
    """The transferred Dodson bound is 2 at μ = 1/2 and matches τ = 1/(1−μ)."""
    assert M.dodson_bound_mu(F(1, 2)) == 2
    assert M.dodson_bound_mu(MU) == M.baker_bounds(1 / (1 - MU)).dodson_upper
    root = M.dodson_threshold()
    assert F(6558, 10**4) < root.lower
    assert root.upper < F(6559, 10**4)


def test_jarnik_transfer():
    """Dirichlet endpoints map to each other and +∞ maps to 1."""
    assert M.jarnik_transfer(F(2)) == F(1, 2)
    assert M.jarnik_transfer(None) == 1
    assert M.jarnik_inverse(F(1)) is None
    with pytest.raises(DomainError):
        M.jarnik_transfer(F(3, 2))


@given(st.fractions(min_value=2, max_value=10**6))
def test_jarnik_round_trip(w: Fraction):
    """w → 1 − 1/w → 1/(1 − (1 − 1/w)) is the identity."""
    assert M.jarnik_inverse(M.jarnik_transfer(w)) == w


def test_upper_gamma_at_six_tenths():
    """γ = 35/54 and the constraints are tight at t_crit."""
    gamma, t = M.upper_gamma(MU)
    assert gamma == F(35, 54)
    assert t == F(45, 19)
    c = M.covering_exponents(MU, t, gamma)
    assert c.b == 2
    assert c.a == F(1, 2)
    assert (c.b - 1) / (1 - MU) - c.a == 2
    assert c.B_minus_b == 0


def test_upper_gamma_domain():
    """γ ≤ 0 past √2/2."""
    with pytest.raises(DomainError, match="γ"):
        M.upper_gamma(F(71, 100))


@given(mus, st.fractions(min_value=1, max_value=10))
def test_covering_exponents_without_gamma(mu: Fraction, t: Fraction):
    """γ = 0 reproduces the single-ball exponents."""
    c = M.covering_exponents(mu, t)
    assert c.B_minus_b == (t * mu * mu - 1) / (1 - mu)
    assert c.A_minus_a == (t * (1 - 2 * mu + 2 * mu * mu) + 2 * mu - 3) / (
        1 - mu
    )


def test_jarnik_ordinary_bound():
    """μ²/(1−μ) = 0.9 at μ = 0.6."""
    assert M.jarnik_ordinary_bound(MU) == F(9, 10)
    assert M.covering_radius_exponent(MU) == F(19, 10)


def test_formula_rows():
    """b₀ and γ only exist below √2/2."""
    row = M.formula_row(MU)
    assert row.gamma == F(35, 54)
    assert row.b0 is not None
    above = M.formula_row(F(4, 5))
    assert above.b0 is None and above.gamma is None
    assert above.lower.lower == above.upper.lower


def test_grids():
    """Default μ-grid has 99 interior points; b-grid spans 2⁻¹⁰…2²⁰."""
    grid = M.mu_grid()
    assert len(grid) == 99
    assert grid[0] == F(101, 200)
    b = M.b_grid()
    assert (b[0], b[-1], len(b)) == (F(1, 1024), F(2**20), 31)
