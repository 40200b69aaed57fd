import math
from fractions import Fraction

import numpy as np
from pytest import approx, mark, raises

from modules.counting import (
    count_growth,
    count_rational_points,
    count_solutions,
    cusp_fraction_exact,
    estimate_beta_direct,
    fit_loglog_slope,
    monte_carlo_cusp_fraction,
    psi_value,
)
from modules.enums import PsiParams
from modules.errors import BadSampleCount, EnumerationBudgetExceeded
from modules.spaces import AmbientSpace

DIRICHLET = PsiParams(Fraction(1), Fraction(0), Fraction(0))


def _brute_force_solutions(x, psi, height):
    """Solutions on P^1 straight from the definition."""
    norm_x = math.hypot(*x)
    total = 0
    top = math.floor(height)
    for a in range(0, top + 1):
        for b in range(-top, top + 1):
            if (a, b) <= (0, 0) or math.gcd(a, b) != 1:
                continue
            h = math.hypot(a, b)
            if h > height:
                continue
            distance = abs(x[0] * b - x[1] * a) / (norm_x * h)
            if distance <= h**-2 * float(psi_value(psi, h)):
                total += 1
    return total


@mark.parametrize(
    ("space", "height", "count"),
    [
        (AmbientSpace.projective(2), 0.5, 0),
        (AmbientSpace.projective(2), 1, 2),
        (AmbientSpace.projective(2), 2, 4),
        (AmbientSpace.projective(2), 5, 24),
        (AmbientSpace.projective(3), 1.5, 9),
        (AmbientSpace.grassmann(2, 3), 1.5, 9),
        (AmbientSpace.grassmann(2, 4), 1, 6),
        (AmbientSpace.grassmann(2, 4), 1.5, 30),
    ],
)
def test_count_rational_points(space, height, count):
    assert count_rational_points(space, height) == count


def test_unsupported_counting():
    with raises(ValueError, match="not supported"):
        count_rational_points(AmbientSpace.grassmann(3, 6), 2)
    with raises(ValueError, match="not supported"):
        count_rational_points(AmbientSpace.quadric(3), 2)


def test_counting_budget():
    with raises(EnumerationBudgetExceeded):
        count_rational_points(AmbientSpace.projective(6), 100)


def test_projective_plane_growth():
    report = count_growth(AmbientSpace.projective(3), [10, 20, 40])
    assert report.counts == tuple(sorted(report.counts))
    assert report.slope == approx(3, abs=0.2)


@mark.parametrize(
    ("space", "heights", "slope"),
    [
        (AmbientSpace.projective(2), [100, 200, 400, 800], 2),
        (AmbientSpace.grassmann(2, 4), [10, 13, 16, 19], 4),
    ],
)
def test_growth_matches_the_counting_exponent(space, heights, slope):
    report = count_growth(space, heights)
    assert report.slope == approx(slope, abs=0.05 * slope)


def test_growth_with_one_height():
    report = count_growth(AmbientSpace.projective(2), [5])
    assert report.counts == (24,)
    assert math.isnan(report.slope)


def test_loglog_slope():
    assert fit_loglog_slope([1, 2, 4], [1, 4, 16]) == approx(2)


def test_psi_value_is_clamped_below_e():
    psi = PsiParams(Fraction(2), Fraction(1), Fraction(1))
    assert psi_value(psi, 2.0) == approx(2)
    assert psi_value(psi, math.exp(4)) == approx(2 / 4 / math.log(4))


@mark.parametrize(
    ("x", "psi"),
    [
        ((1.0, math.sqrt(2)), DIRICHLET),
        ((1.0, (1 + math.sqrt(5)) / 2), DIRICHLET),
        ((math.pi, 1.0), PsiParams(Fraction(1, 2), Fraction(1), Fraction(0))),
    ],
)
def test_count_solutions_matches_brute_force(x, psi):
    assert count_solutions(x, psi, 60) == _brute_force_solutions(x, psi, 60)


def test_count_solutions_edge_cases():
    assert count_solutions((1.0, 0.3), PsiParams(Fraction(0), Fraction(0), Fraction(0)), 50) == 0
    assert count_solutions((1.0, 0.3), DIRICHLET, 0.5) == 0
    with raises(ValueError, match="zero vector"):
        count_solutions((0.0, 0.0), DIRICHLET, 10)
    with raises(ValueError, match="projective"):
        count_solutions((1.0, 0.3), DIRICHLET, 10, AmbientSpace.grassmann(2, 4))
    with raises(ValueError, match=">= 0"):
        count_solutions((1.0, 0.3), PsiParams(Fraction(1), Fraction(-1), Fraction(0)), 10)


def test_direct_beta_of_a_quadratic_irrational():
    estimate = estimate_beta_direct(math.sqrt(2), 100_000)
    assert estimate.beta == approx(2, abs=0.15)
    assert estimate.records >= 5


def test_direct_beta_needs_records():
    with raises(ValueError, match="Not enough"):
        estimate_beta_direct(0.5, 100)


def test_cusp_fraction_formula():
    assert cusp_fraction_exact(0.5) == approx(0.75 / math.pi)
    assert cusp_fraction_exact(1) == approx(3 / math.pi)
    assert cusp_fraction_exact(1.0000001) == approx(3 / math.pi, abs=1e-5)
    assert cusp_fraction_exact(2 / math.sqrt(3)) == approx(1)
    assert cusp_fraction_exact(2) == 1


def test_monte_carlo_matches_the_formula():
    radii = [0.3, 0.5, 1.0, 1.05]
    estimate = monte_carlo_cusp_fraction(radii, 40_000, seed=5, threads=1)
    for r, fraction in zip(radii, estimate, strict=True):
        assert fraction == approx(cusp_fraction_exact(r), abs=0.02)


def test_monte_carlo_is_seeded():
    first = monte_carlo_cusp_fraction([0.5], 1000, seed=9, threads=1)
    assert monte_carlo_cusp_fraction([0.5], 1000, seed=9, threads=1) == first
    assert monte_carlo_cusp_fraction([0.5], 1000, seed=9, threads=2) == first
    with raises(BadSampleCount):
        monte_carlo_cusp_fraction([0.5], 0)


def test_khintchine_dichotomy_on_the_projective_line():
    # sum 1 / (q log q) diverges, sum 1 / (q log^2 q) converges
    rng = np.random.default_rng(13)
    points = [(1.0, float(xi)) for xi in rng.uniform(0, 1, size=50)]
    divergent = PsiParams(Fraction(3), Fraction(1), Fraction(0))
    convergent = PsiParams(Fraction(3), Fraction(2), Fraction(0))

    growing = sum(
        count_solutions(x, divergent, 10**6) > count_solutions(x, divergent, 10**3) for x in points
    )
    settled = sum(
        count_solutions(x, convergent, 10**6) == count_solutions(x, convergent, 10**5) for x in points
    )
    assert growing >= 0.9 * len(points)
    assert settled >= 0.8 * len(points)
