import random
from fractions import Fraction

from pytest import mark, raises

from modules import exact_linalg as la
from modules.enums import Family
from modules.errors import BadEndpoints, EmptyFamily, PreconditionViolated, UnsupportedFamily
from modules.root_core import (
    ChamberVector,
    build_root_system,
    chamber_glb,
    chamber_sup,
    enumerate_weyl,
    expected_positive_root_count,
    find_separating_root,
    isotonic_regression,
    longest_element,
    project_neg_chamber,
    project_type_a_minorant,
    project_type_a_pava,
    project_with_multipliers,
    type_a_convex_minorant,
    verify_stratification,
    weyl_act,
    weyl_element,
)

CLASSICAL = [
    (family, rank)
    for family in Family
    for rank in range(family.min_rank(), 6)
]

CARTAN_DETERMINANT = {
    Family.A: lambda r: r + 1,
    Family.B: lambda _: 2,
    Family.C: lambda _: 2,
    Family.D: lambda _: 4,
}


def _random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-20, 20), rng.randint(1, 6))


@mark.parametrize(("family", "rank"), CLASSICAL)
def test_root_data(family, rank):
    rs = build_root_system(family, rank)

    assert len(rs.positive_roots) == expected_positive_root_count(family, rank)
    assert la.determinant(rs.cartan_matrix) == CARTAN_DETERMINANT[family](rank)
    assert all(rs.cartan_matrix[i][i] == 2 for i in range(rank))

    # 2 <varpi_i, alpha_j> / |alpha_j|^2 = delta_ij
    for i, w in enumerate(rs.fundamental_weights):
        for j, alpha in enumerate(rs.simple_roots):
            expected = 1 if i == j else 0
            assert 2 * la.dot(w, alpha) / rs.root_lengths_squared[j] == expected


def test_a2_positive_roots():
    rs = build_root_system("A", 2)
    assert [root.coefficients for root in rs.positive_roots] == [(0, 1), (1, 0), (1, 1)]
    assert rs.cartan_matrix == la.mat([[2, -1], [-1, 2]])


def test_rank_and_family_errors():
    with raises(PreconditionViolated, match="needs rank at least"):
        build_root_system(Family.D, 2)
    with raises(PreconditionViolated, match="needs rank at least"):
        build_root_system("A", 0)
    with raises(UnsupportedFamily):
        build_root_system("E", 6)
    with raises(UnsupportedFamily):
        Family.from_str("Z")


@mark.parametrize(
    ("family", "rank", "order"),
    [(Family.A, 2, 6), (Family.A, 3, 24), (Family.B, 2, 8), (Family.C, 3, 48), (Family.D, 4, 192)],
)
def test_weyl_group(family, rank, order):
    rs = build_root_system(family, rank)
    group = enumerate_weyl(rs)
    assert len(group) == order
    assert len({w.matrix for w in group}) == order
    assert longest_element(rs).length == len(rs.positive_roots)


def test_weyl_words_are_reduced():
    rs = build_root_system(Family.B, 3)
    for w in enumerate_weyl(rs):
        # the length of w is the number of positive roots it sends to negative ones
        inversions = sum(1 for root in rs.positive_roots if not rs.is_positive(w.act(root.vector)))
        assert w.length == inversions


def test_weyl_element_from_word():
    rs = build_root_system(Family.A, 2)
    w = weyl_element(rs, [0, 1])
    assert w.word == (0, 1)
    assert w.one_line() == (2, 3, 1)
    with raises(ValueError, match="out of range"):
        weyl_element(rs, [2])


def test_weyl_act_in_type_a_permutes_the_diagonal():
    rs = build_root_system(Family.A, 2)
    y = ChamberVector.from_diag(rs, [-1, 0, 1])
    for w in enumerate_weyl(rs):
        yw = weyl_act(w, y)
        image = w.one_line()
        assert yw.diag_coords == tuple(y.diag_coords[image[i] - 1] for i in range(3))


def test_chamber_coordinates():
    rs = build_root_system(Family.A, 2)
    y = ChamberVector.from_diag(rs, [-1, 0, 1])
    assert y.eval_coords == (-1, -1)
    assert y.alpha_values == (-1, -1)
    assert y.in_negative_chamber()
    assert ChamberVector.from_eval_coords(rs, y.eval_coords) == y
    assert ChamberVector.from_alpha_values(rs, y.alpha_values) == y
    assert ChamberVector.from_dict(y.to_dict(), rs) == y


@mark.parametrize(("family", "rank"), CLASSICAL)
def test_projection_kkt(family, rank):
    rs = build_root_system(family, rank)
    rng = random.Random(f"{family.value}{rank}")
    for _ in range(40):
        y0 = ChamberVector.from_root_coords(rs, [_random_fraction(rng) for _ in range(rank)])
        p, multipliers = project_with_multipliers(y0)

        assert p.in_negative_chamber()
        assert all(t >= 0 for t in multipliers)
        assert all(t * a == 0 for t, a in zip(multipliers, p.alpha_values, strict=True))
        assert project_neg_chamber(p) == p


def test_projection_oracles_agree_in_type_a():
    rng = random.Random(5)
    for _ in range(300):
        rank = rng.randint(1, 6)
        rs = build_root_system(Family.A, rank)
        diag = [_random_fraction(rng) for _ in range(rank)]
        diag.append(-sum(diag))
        y0 = ChamberVector.from_diag(rs, diag)

        expected = project_neg_chamber(y0)
        assert project_type_a_pava(y0) == expected
        assert project_type_a_minorant(y0) == expected


def test_isotonic_regression():
    assert isotonic_regression([Fraction(3), Fraction(1), Fraction(2)]) == (2, 2, 2)
    assert isotonic_regression([Fraction(1), Fraction(3), Fraction(2)]) == (1, Fraction(5, 2), Fraction(5, 2))


def test_convex_minorant():
    assert type_a_convex_minorant([0, 1, -2, 0]) == (0, -1, -2, 0)
    with raises(BadEndpoints):
        type_a_convex_minorant([1, 0])


def test_glb_and_sup():
    rs = build_root_system(Family.A, 2)
    a = ChamberVector.from_eval_coords(rs, [-1, -3])
    b = ChamberVector.from_eval_coords(rs, [-2, -1])
    assert chamber_glb([a, b]).eval_coords == (-2, -3)
    assert chamber_sup([a, b]).eval_coords == (-1, -1)
    with raises(EmptyFamily):
        chamber_glb([])


def test_separating_root():
    rs = build_root_system(Family.A, 2)
    y1 = ChamberVector.from_eval_coords(rs, [-40, -40])
    y2 = ChamberVector.from_eval_coords(rs, [-1, -2])
    found = find_separating_root(y1, y2, Fraction(1, 10))
    assert found.index == 0
    assert found.alpha_value <= found.tau * -2.302585

    with raises(PreconditionViolated):
        find_separating_root(y2, y1, Fraction(1, 10))


@mark.parametrize(("family", "rank"), CLASSICAL)
def test_levels_are_generated_by_level_one(family, rank):
    rs = build_root_system(family, rank)
    for i in range(rank):
        theta = frozenset(j for j in range(rank) if j != i)
        assert verify_stratification(rs, theta)
