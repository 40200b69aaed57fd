import math
from fractions import Fraction

import mpmath
from pytest import approx, mark, raises

from modules.counting import estimate_beta_direct
from modules.errors import AllInfinite, BadSampleCount, PoleOrBeyond
from modules.flag_exponents import FlagVarietySpec
from modules.flows import (
    OrbitTrace,
    PolynomialCurve,
    TraceRecord,
    algebraic_orbit_limit,
    beta_from_gamma,
    curve_experiment,
    dani_matrix,
    estimate_gamma,
    flow_orbit,
    point_orbit,
)
from modules.spaces import AmbientSpace

IDENTITY_3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
with mpmath.workdps(100):
    GOLDEN = (1 + mpmath.sqrt(5)) / 2
    SQRT2, SQRT3 = mpmath.sqrt(2), mpmath.sqrt(3)
HALF_STEPS_TO_40 = [t / 2 for t in range(1, 81)]
# (a, b, c, d) with ad - bc = +-1
MOEBIUS = [
    (1, 0, 0, 1), (1, 1, 0, 1), (1, 2, 0, 1), (1, 3, 0, 1), (0, 1, 1, 0),
    (0, 1, 1, 1), (0, 1, 1, 2), (0, 1, 1, 3), (0, 1, 1, 4), (1, 0, 1, 1),
    (1, 0, 2, 1), (1, 0, 3, 1), (1, 1, 1, 2), (2, 1, 1, 1), (2, 1, 3, 2),
    (3, 1, 2, 1), (1, 2, 1, 3), (3, 2, 1, 1), (1, 1, 2, 3), (2, 3, 1, 2),
]


def test_dani_matrix():
    s = dani_matrix([2, 3])
    assert [[float(x) for x in row] for row in s] == [[1, 0, 0], [2, 1, 0], [3, 0, 1]]


def test_identity_orbit():
    trace = flow_orbit(IDENTITY_3, (-1, 0, 1), [0, 1, 5])
    assert trace.records[0].flags == ()
    assert trace.records[2].log_minima == approx((-5, 0, 5))
    assert trace.records[2].c.eval_coords == approx((-5, -5))
    assert trace.records[2].flags == (1, 2)
    assert trace.lipschitz_holds()


def test_orbit_csv():
    trace = flow_orbit(IDENTITY_3, (-1, 0, 1), [1, 2])
    lines = trace.to_csv().splitlines()
    assert lines[0] == "t,log_lambda_1,log_lambda_2,log_lambda_3,log_r_chi,c_1,c_2,flags"
    assert len(lines) == 3
    assert lines[1].split(",")[4] == ""


def test_orbit_rejects_bad_input():
    with raises(ValueError, match="diagonal entries"):
        flow_orbit(IDENTITY_3, (-1, 1), [1])
    with raises(ValueError, match="empty"):
        flow_orbit(IDENTITY_3, (-1, 0, 1), [])
    with raises(ValueError, match="strictly increasing"):
        flow_orbit(IDENTITY_3, (-1, 0, 1), [2, 1])
    with raises(ValueError, match="Flow times"):
        flow_orbit(IDENTITY_3, (-1, 0, 1), [1000])


def test_rational_point_reaches_the_pole():
    # [1 : 1/2] = [2 : 1], whose integer vector shrinks like 2 e^{-t/2}
    trace = point_orbit([0.5], [10, 20, 30, 40])
    gamma = estimate_gamma(trace)
    assert gamma.sup == approx(0.5 - math.log(2) / 40)
    assert gamma.inf == approx(0.5 - math.log(2) / 20)
    assert gamma.window == (20, 40)
    assert gamma.samples == 3


def test_golden_ratio_has_the_almost_sure_rate():
    trace = point_orbit([GOLDEN], HALF_STEPS_TO_40)
    gamma = estimate_gamma(trace)
    assert abs(gamma.sup) <= 0.05
    assert beta_from_gamma(gamma.sup, AmbientSpace.projective(2)) == approx(2, abs=0.1)
    assert trace.lipschitz_holds()


def test_liouville_point_is_very_well_approximable():
    # sum of 2^-(n!)^2: the gaps between its convergents make -log r_chi / t large
    with mpmath.workdps(250):
        xi = mpmath.fsum(mpmath.ldexp(1, -math.factorial(n) ** 2) for n in range(1, 5))
    trace = point_orbit([xi], [18, 20, 22, 23, 24, 25, 26, 28, 30, 32, 35])
    assert estimate_gamma(trace).sup >= 0.3


def test_gamma_and_direct_beta_agree():
    # points equivalent to the golden ratio, so every late partial quotient is 1
    projective_line = AmbientSpace.projective(2)
    for a, b, c, d in MOEBIUS:
        with mpmath.workdps(100):
            xi = (a * GOLDEN + b) / (c * GOLDEN + d)
        gamma = estimate_gamma(point_orbit([xi], range(20, 41)))
        predicted = beta_from_gamma(gamma.sup, projective_line)
        assert predicted == approx(estimate_beta_direct(float(xi), 1_000_000).beta, abs=0.15)


def test_estimate_gamma_needs_finite_values():
    record = TraceRecord(1.0, (0.0, 0.0), None, None)
    with raises(AllInfinite, match="ran out of budget"):
        estimate_gamma(OrbitTrace((-0.5, 0.5), (record,)))


@mark.parametrize(
    ("gamma", "target", "beta"),
    [
        (0, AmbientSpace.projective(3), 1.5),
        (0.5, AmbientSpace.projective(2), math.inf),
        (0, FlagVarietySpec.grassmannian(2, 4), 1),
        (0, AmbientSpace.quadric(3), 1),
    ],
)
def test_beta_from_gamma(gamma, target, beta):
    assert beta_from_gamma(gamma, target) == approx(beta)


def test_beta_beyond_the_pole():
    with raises(PoleOrBeyond):
        beta_from_gamma(1, AmbientSpace.projective(3))


def test_algebraic_orbit_limit_of_a_diagonal_lattice():
    limit = algebraic_orbit_limit(IDENTITY_3, (-1, 0, 1), 4)
    assert limit.limit.eval_coords == approx((-1, -1))
    assert limit.trace.t_grid[0] == 0


def test_badly_approximable_orbit_stays_bounded():
    limit = algebraic_orbit_limit(dani_matrix([math.sqrt(2)]), (-0.5, 0.5), 20)
    assert limit.limit.norm < 0.1


def test_orbit_of_a_block_split_float_basis():
    trace = flow_orbit([[1.0, 0, 0], [0, 1.0, 0], [0, 1.0, 1.0]], (-1, 0, 1), [0, 5])
    assert trace.records[0].log_minima == approx((0, 0, 0), abs=1e-9)
    assert trace.records[1].log_minima[0] == approx(-5)


def test_generic_algebraic_point_has_no_drift():
    s = [[1, 0, 0], [SQRT2, 1, 0], [SQRT3, SQRT2 + 2 * SQRT3, 1]]
    limit = algebraic_orbit_limit(s, (-1, 0, 1), 40, steps=2)
    assert limit.limit.norm <= 0.05


def test_upper_unipotent_algebraic_point_follows_the_fixed_flag():
    # e_1 and span(e_1, e_2) are rational and contracted, as for the identity
    s = [[1, SQRT2, SQRT3], [0, 1, SQRT2 + 2 * SQRT3], [0, 0, 1]]
    limit = algebraic_orbit_limit(s, (-1, 0, 1), 40, steps=2)
    assert limit.limit.eval_coords == approx((-1, -1), abs=0.05)


def test_algebraic_point_in_an_unstable_cell():
    # permutation [2, 1, 3] times an upper unipotent: e_2 and span(e_1, e_2) are rational,
    # so lambda_1 decays like e^{-T/2} and the plane like e^{-T}
    s = [[0, 1, SQRT2 + 2 * SQRT3], [1, SQRT2, SQRT3], [0, 0, 1]]
    limit = algebraic_orbit_limit(s, (-1, 0, 1), 40, steps=2)
    assert limit.limit.eval_coords == approx((-0.5, -1), abs=0.05)


def test_unipotent_curve():
    curve = PolynomialCurve.unipotent(3)
    assert [[float(x) for x in row] for row in curve.at(2)] == [[1, 0, 0], [2, 1, 0], [4, 8, 1]]

    upper = PolynomialCurve.unipotent(3, lower=False)
    assert [[float(x) for x in row] for row in upper.at(2)] == [[1, 2, 4], [0, 1, 8], [0, 0, 1]]

    permuted = PolynomialCurve.unipotent(3, [2, 1, 3])
    assert [[float(x) for x in row] for row in permuted.at(0)] == [[0, 1, 0], [1, 0, 0], [0, 0, 1]]

    with raises(ValueError, match="not a permutation"):
        PolynomialCurve.unipotent(3, [1, 1, 3])


def test_curve_validation():
    with raises(ValueError, match="square"):
        PolynomialCurve((((Fraction(1),), (Fraction(0),)),))
    with raises(ValueError, match="lo < hi"):
        PolynomialCurve(PolynomialCurve.constant([[1]]).entries, (1.0, 0.0))


def test_curve_inside_a_contracted_line():
    # every sample keeps e_1, which the flow contracts at rate 1/2
    curve = PolynomialCurve.unipotent(2, lower=False)
    report = curve_experiment(curve, (-0.5, 0.5), [2, 4], n_samples=3, seed=1, threads=1)
    last = report.steps[-1]
    assert last.rate.eval_coords == approx((-0.5,))
    assert max(last.deviations) == approx(0, abs=1e-9)
    assert last.exceed == {0.2: 0.0}
    assert len(report.samples) == 3


def test_curve_experiment_is_seeded():
    curve = PolynomialCurve.unipotent(2)
    first = curve_experiment(curve, (-0.5, 0.5), [1, 2], n_samples=2, seed=7, threads=1)
    second = curve_experiment(curve, (-0.5, 0.5), [1, 2], n_samples=2, seed=7, threads=1)
    assert first.samples == second.samples
    assert first.to_dict() == second.to_dict()


def test_curve_experiment_checks():
    curve = PolynomialCurve.unipotent(2)
    with raises(BadSampleCount):
        curve_experiment(curve, (-0.5, 0.5), [1], n_samples=0)
    with raises(ValueError, match="positive flow times"):
        curve_experiment(curve, (-0.5, 0.5), [0, 1], n_samples=1)


def test_curve_concentrates_along_the_flow():
    # lower unipotent (u, u^2, u^3): the sampled orbits stay within 0.2 T of c(a_T S)
    curve = PolynomialCurve.unipotent(3)
    report = curve_experiment(curve, (-1, 0, 1), [10, 20, 30, 40], n_samples=100, seed=3, threads=1)
    fractions = [step.exceed[0.2] for step in report.steps]
    assert fractions == sorted(fractions, reverse=True)
    assert fractions[-1] <= 0.1
