import math
from fractions import Fraction
from itertools import combinations

from pytest import mark, raises

from modules.enums import Family, KhintchineVerdict, PsiParams
from modules.errors import InvalidFlagSpec
from modules.flag_exponents import (
    FlagVarietySpec,
    anticanonical_weight,
    beta_almost_sure,
    cc_dimension,
    counting_bound,
    counting_exponents,
    flow_element,
    format_exponent,
    khintchine_classify,
    khintchine_constants,
    khintchine_profile,
    level_dimensions,
    parse_exponent,
    quadric_khintchine_profile,
    quadric_profile,
)
from modules.root_core import build_root_system


def _proper_subsets(rank: int):
    for size in range(rank):
        yield from (frozenset(c) for c in combinations(range(rank), size))


SPLIT = [(family, rank) for family in Family for rank in range(family.min_rank(), 5)]


@mark.parametrize("d", range(2, 7))
def test_projective_exponent(d):
    fv = FlagVarietySpec.projective(d)
    assert beta_almost_sure(fv) == 1 + Fraction(1, d - 1)
    assert cc_dimension(fv.rs, fv.theta) == d - 1


@mark.parametrize(("ell", "d"), [(ell, d) for d in range(3, 9) for ell in range(1, d)])
def test_grassmannian_exponent(ell, d):
    fv = FlagVarietySpec.grassmannian(ell, d)
    assert beta_almost_sure(fv) == Fraction(1, ell) + Fraction(1, d - ell)


def test_flow_element_of_the_projective_plane():
    fv = FlagVarietySpec.projective(3)
    y = flow_element(fv)
    assert y.diag_coords == (Fraction(-2, 3), Fraction(1, 3), Fraction(1, 3))
    assert fv.pair(y) == Fraction(-2, 3)


@mark.parametrize(("family", "rank"), SPLIT)
def test_anticanonical_height_gives_inverse_cc_dimension(family, rank):
    rs = build_root_system(family, rank)
    for theta in _proper_subsets(rank):
        fv = FlagVarietySpec.with_anticanonical(rs, theta)
        assert beta_almost_sure(fv) == Fraction(1, cc_dimension(rs, theta))


@mark.parametrize(("family", "rank"), SPLIT)
def test_anticanonical_khintchine_constants(family, rank):
    rs = build_root_system(family, rank)
    for theta in _proper_subsets(rank):
        fv = FlagVarietySpec.with_anticanonical(rs, theta)
        assert khintchine_constants(fv) == (1, rank - len(theta))


@mark.parametrize(("family", "rank"), SPLIT)
def test_fundamental_weights_have_b_one(family, rank):
    rs = build_root_system(family, rank)
    for i in range(rank):
        theta = frozenset(j for j in range(rank) if j != i)
        fv = FlagVarietySpec(rs, theta, tuple(int(j == i) for j in range(rank)))
        _, b = khintchine_constants(fv)
        assert b == 1


@mark.parametrize("d", range(2, 7))
def test_projective_khintchine_power(d):
    profile = khintchine_profile(FlagVarietySpec.projective(d))
    assert profile.a_chi / profile.beta_X == d - 1


@mark.parametrize(("ell", "d"), [(1, 3), (2, 4), (2, 5), (3, 6)])
def test_grassmannian_khintchine_power(ell, d):
    profile = khintchine_profile(FlagVarietySpec.grassmannian(ell, d))
    assert profile.a_chi / profile.beta_X == ell * (d - ell)
    assert profile.b_chi == 1


@mark.parametrize(
    ("psi", "verdict"),
    [
        ((1, 0, 0), KhintchineVerdict.DIVERGENT),
        ((1, Fraction(1, 4), 0), KhintchineVerdict.DIVERGENT),
        ((1, Fraction(1, 4), Fraction(1, 4)), KhintchineVerdict.DIVERGENT),
        ((1, Fraction(1, 4), 1), KhintchineVerdict.CONVERGENT),
        ((5, 1, 0), KhintchineVerdict.CONVERGENT),
    ],
)
def test_khintchine_classify_on_grass_2_4(psi, verdict):
    profile = khintchine_profile(FlagVarietySpec.grassmannian(2, 4))
    assert khintchine_classify(profile, PsiParams(*(Fraction(x) for x in psi))) == verdict


def test_khintchine_on_the_projective_line():
    profile = khintchine_profile(FlagVarietySpec.projective(2))
    divergent = PsiParams(Fraction(1), Fraction(1), Fraction(0))
    convergent = PsiParams(Fraction(1), Fraction(2), Fraction(0))
    assert khintchine_classify(profile, divergent) == KhintchineVerdict.DIVERGENT
    assert khintchine_classify(profile, convergent) == KhintchineVerdict.CONVERGENT
    with raises(ValueError, match="positive constant"):
        khintchine_classify(profile, PsiParams(Fraction(0), Fraction(1), Fraction(0)))


@mark.parametrize("d", range(2, 7))
def test_projective_counting(d):
    fv = FlagVarietySpec.projective(d)
    assert anticanonical_weight(fv.rs, fv.theta) == (d, *(0,) * (d - 2))
    assert counting_exponents(fv) == (d, 1)
    assert counting_bound(fv) == beta_almost_sure(fv)


def test_grassmannian_counting():
    fv = FlagVarietySpec.grassmannian(2, 4)
    assert counting_exponents(fv) == (4, 1)
    assert level_dimensions(fv.rs, fv.theta) == {1: 4}


def test_full_flag_levels():
    rs = build_root_system(Family.A, 2)
    assert level_dimensions(rs, frozenset()) == {1: 2, 2: 1}
    assert cc_dimension(rs, frozenset()) == 4


def test_invalid_specs():
    rs = build_root_system(Family.A, 3)
    with raises(InvalidFlagSpec, match="exactly off theta"):
        FlagVarietySpec(rs, frozenset({0}), (1, 1, 0))
    with raises(InvalidFlagSpec, match="proper subset"):
        FlagVarietySpec(rs, frozenset({0, 1, 2}), (0, 0, 0))
    with raises(InvalidFlagSpec, match="coefficients"):
        FlagVarietySpec(rs, frozenset(), (1, 1))
    with raises(InvalidFlagSpec):
        FlagVarietySpec.grassmannian(3, 3)


def test_spec_round_trip():
    rs = build_root_system(Family.A, 3)
    fv = FlagVarietySpec(rs, frozenset(), (1, 1, 4))
    assert FlagVarietySpec.from_dict(fv.to_dict()) == fv
    assert fv.name == "flag:A3:theta=:chi=1,1,4"


def test_quadric_profiles():
    assert quadric_profile(3, is_x0=False).beta == 1
    profile = quadric_khintchine_profile(4, is_x0=True)
    assert profile.a_chi / profile.beta_X == 4
    assert profile.b_chi == 2
    with raises(ValueError, match="at least 1"):
        quadric_profile(0, is_x0=False)


def test_exponent_text():
    assert format_exponent(Fraction(3, 2)) == "3/2"
    assert format_exponent(math.inf) == "inf"
    assert parse_exponent("inf") == math.inf
    assert parse_exponent("5/4") == Fraction(5, 4)
