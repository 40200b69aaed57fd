from pytest import mark, raises

from modules.enums import Family
from modules.errors import SpaceSpecError
from modules.flag_exponents import FlagVarietySpec
from modules.space_spec import (
    FlagSpec,
    GrassmannianSpec,
    ProjectiveSpec,
    QuadricSpec,
    spacespec_format,
    spacespec_parse,
)


@mark.parametrize(
    "text",
    [
        "projective:2",
        "projective:4",
        "grassmannian:2,5",
        "flag:A3:theta=:chi=1,1,4",
        "flag:A3:theta=2:chi=1,0,1",
        "flag:B3:theta=1,2:chi=0,0,1",
        "flag:D4:theta=:chi=1,1,1,1",
        "quadric:3",
        "quadric:5,x0",
    ],
)
def test_round_trip(text):
    spec = spacespec_parse(text)
    assert spacespec_format(spec) == text
    assert spacespec_parse(spacespec_format(spec)) == spec


def test_projective_spec():
    spec = spacespec_parse("projective:4")
    assert spec == ProjectiveSpec(4)
    fv = spec.flag_variety()
    assert fv == FlagVarietySpec.projective(4)
    assert fv.theta == frozenset({1, 2})
    assert fv.chi == (1, 0, 0)


def test_grassmannian_spec():
    fv = spacespec_parse("grassmannian:2,5").flag_variety()
    assert fv.theta == frozenset({0, 2, 3})
    assert fv.chi == (0, 1, 0, 0)


def test_full_flag_spec():
    spec = spacespec_parse("flag:A3:theta=:chi=1,1,4")
    assert spec == FlagSpec(Family.A, 3, (), (1, 1, 4))
    fv = spec.flag_variety()
    assert fv.theta == frozenset()
    assert fv.chi == (1, 1, 4)


def test_quadric_spec():
    spec = spacespec_parse("quadric:4,x0")
    assert spec == QuadricSpec(4, is_x0=True)
    fv = spec.flag_variety()
    assert fv.rs.family == Family.D
    assert fv.rs.rank == 3
    assert fv.chi == (1, 0, 0)

    odd = spacespec_parse("quadric:3").flag_variety()
    assert odd.rs.family == Family.B
    assert odd.rs.rank == 2


def test_grassmannian_spec_type():
    assert spacespec_parse("grassmannian:1,3") == GrassmannianSpec(1, 3)


@mark.parametrize(
    ("text", "position"),
    [
        ("projective:x", 11),
        ("projective:1", 11),
        ("grassmannian:3,3", 13),
        ("grassmannian:2;4", 14),
        ("flag:E6:theta=:chi=1", 5),
        ("flag:A3:theta=:chi=", 19),
        ("flag:A3:chi=1,1,1", 7),
        ("flag:A3:theta=1:chi=1,1,1", 20),
        ("sphere:2", 0),
        ("quadric:3,x1", 9),
        ("projective:3 ", 12),
    ],
)
def test_syntax_errors_carry_positions(text, position):
    with raises(SpaceSpecError) as info:
        spacespec_parse(text)
    assert info.value.position == position
    assert info.value.text == text
