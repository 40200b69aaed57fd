"""
Exact root-system combinatorics for the split classical families A, B, C, D.

Conventions (fixed once for the whole package):
- roots live in the epsilon realization with the standard inner product
  (A_r in R^{r+1} with alpha_i = e_i - e_{i+1}; B_r, C_r, D_r in R^r);
- indices of simple roots are 0-based in code and 1-based in user-facing text;
- a Weyl word (i_1, ..., i_k) is the matrix s_{i_1} ... s_{i_k}, and
  Y^w = (Ad w)^{-1} Y is the transposed matrix applied to Y;
- a^- = {Y : alpha_i(Y) <= 0 for all i}, and Y1 < Y2 means omega_i(Y1) <= omega_i(Y2).
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from typing import TYPE_CHECKING, NamedTuple

from . import exact_linalg as la
from . import global_vars as gv
from .enums import Family
from .errors import (
    BadEndpoints,
    EmptyFamily,
    GroupTooLarge,
    MismatchedRootSystem,
    PreconditionViolated,
    RankTooLarge,
)
from .logger import logger

if TYPE_CHECKING:
    from typing import Self


@dataclass(frozen=True)
class PositiveRoot:
    coefficients: tuple[int, ...]
    vector: la.Vector

    @property
    def height(self) -> int:
        return sum(self.coefficients)

    def level(self, theta: frozenset[int]) -> int:
        """Number of simple roots outside theta in this root, with multiplicity."""
        return sum(c for i, c in enumerate(self.coefficients) if i not in theta)


@dataclass(frozen=True, eq=False)
class RootSystem:
    family: Family
    rank: int
    simple_roots: tuple[la.Vector, ...]
    positive_roots: tuple[PositiveRoot, ...]
    cartan_matrix: la.Matrix
    gram: la.Matrix
    fundamental_weights: tuple[la.Vector, ...]
    fw_multipliers: tuple[int, ...]

    @property
    def name(self) -> str:
        return f"{self.family.value}{self.rank}"

    @property
    def ambient_dim(self) -> int:
        return len(self.simple_roots[0])

    @property
    def is_type_a(self) -> bool:
        return self.family == Family.A

    def same_as(self, other: "RootSystem") -> bool:
        return self.family == other.family and self.rank == other.rank

    @cached_property
    def gram_inverse(self) -> la.Matrix:
        return la.inverse(self.gram)

    @cached_property
    def root_lengths_squared(self) -> la.Vector:
        return tuple(self.gram[i][i] for i in range(self.rank))

    @cached_property
    def dual_basis(self) -> tuple[la.Vector, ...]:
        # alpha_j(Y_i) = delta_ij
        return tuple(
            la.scale(w, 2 / self.root_lengths_squared[i])
            for i, w in enumerate(self.fundamental_weights)
        )

    @cached_property
    def regular_dominant(self) -> la.Vector:
        """A vector with trivial stabilizer in W, used as a hash key for Weyl elements."""
        result = la.zeros(self.ambient_dim)
        for i, w in enumerate(self.fundamental_weights):
            # distinct weights keep every coordinate generic
            result = la.add(result, la.scale(w, Fraction(self.rank + i + 1, self.rank)))
        return result

    def weyl_group_order(self) -> int:
        r = self.rank
        match self.family:
            case Family.A:
                return math.factorial(r + 1)
            case Family.B | Family.C:
                return 2**r * math.factorial(r)
            case Family.D:
                return 2 ** (r - 1) * math.factorial(r)

    def reflect(self, i: int, v: la.Vector) -> la.Vector:
        alpha = self.simple_roots[i]
        factor = 2 * la.dot(v, alpha) / self.root_lengths_squared[i]
        return la.sub(v, la.scale(alpha, factor))

    def simple_coefficients(self, v: la.Vector) -> la.Vector:
        """Coefficients of v over the simple roots (v must lie in their span)."""
        pairings = tuple(la.dot(alpha, v) for alpha in self.simple_roots)
        return la.mat_vec(self.gram_inverse, pairings)

    def is_positive(self, root: la.Vector) -> bool:
        return la.dot(root, self.regular_dominant) > 0

    def levels(self, theta: frozenset[int]) -> dict[int, list[PositiveRoot]]:
        result: dict[int, list[PositiveRoot]] = {}
        for root in self.positive_roots:
            lvl = root.level(theta)
            if lvl > 0:
                result.setdefault(lvl, []).append(root)
        return dict(sorted(result.items()))

    def root_sum(self, theta: frozenset[int] | None = None) -> la.Vector:
        """Sum of all positive roots, or of those outside <theta> when theta is given."""
        total = la.zeros(self.ambient_dim)
        for root in self.positive_roots:
            if theta is None or root.level(theta) > 0:
                total = la.add(total, root.vector)
        return total

    def weight_vector(self, coefficients: Sequence[int | Fraction]) -> la.Vector:
        """sum n_i * varpi_i as an ambient vector."""
        return la.linear_combination(la.vec(coefficients), self.fundamental_weights)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "rank": self.rank,
            "simple_roots": [[la.format_fraction(x) for x in a] for a in self.simple_roots],
            "positive_roots": [list(root.coefficients) for root in self.positive_roots],
            "cartan_matrix": [[la.format_fraction(x) for x in row] for row in self.cartan_matrix],
            "gram": [[la.format_fraction(x) for x in row] for row in self.gram],
            "fundamental_weights": [
                [la.format_fraction(x) for x in w] for w in self.fundamental_weights
            ],
            "fw_multipliers": list(self.fw_multipliers),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        rs = build_root_system(Family.from_str(data["family"]), int(data["rank"]))
        stored = [la.vec(a) for a in data.get("simple_roots", [])]
        if stored and tuple(stored) != rs.simple_roots:
            msg = f"Serialized simple roots do not match the standard realization of {rs.name}."
            raise ValueError(msg)
        return rs


def _simple_roots(family: Family, rank: int) -> tuple[la.Vector, ...]:
    n = rank + 1 if family == Family.A else rank

    roots = [la.sub(la.unit(n, i), la.unit(n, i + 1)) for i in range(rank - 1)]
    match family:
        case Family.A:
            roots.append(la.sub(la.unit(n, rank - 1), la.unit(n, rank)))
        case Family.B:
            roots.append(la.unit(n, rank - 1))
        case Family.C:
            roots.append(la.scale(la.unit(n, rank - 1), 2))
        case Family.D:
            roots.append(la.add(la.unit(n, rank - 2), la.unit(n, rank - 1)))

    return tuple(roots)


def _multipliers(family: Family, rank: int) -> tuple[int, ...]:
    # omega_i = b_i varpi_i is a weight of the natural matrix group
    b = [1] * rank
    match family:
        case Family.B:
            b[rank - 1] = 2
        case Family.D:
            b[rank - 2] = 2
            b[rank - 1] = 2
        case _:
            pass
    return tuple(b)


@cache
def _build(family: Family, rank: int) -> RootSystem:
    simple = _simple_roots(family, rank)
    gram = la.gram_matrix(simple)
    gram_inv = la.inverse(gram)
    lengths = tuple(gram[i][i] for i in range(rank))

    def reflect(i: int, v: la.Vector) -> la.Vector:
        return la.sub(v, la.scale(simple[i], 2 * la.dot(v, simple[i]) / lengths[i]))

    # reflection closure of the simple roots gives the whole root system
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        fresh = []
        for v in frontier:
            for i in range(rank):
                image = reflect(i, v)
                if image not in roots:
                    roots.add(image)
                    fresh.append(image)
        frontier = fresh

    positive: list[PositiveRoot] = []
    for v in roots:
        coefficients = la.mat_vec(gram_inv, tuple(la.dot(a, v) for a in simple))
        if any(c.denominator != 1 for c in coefficients):
            msg = f"Root {v} has non-integral coefficients."
            raise ArithmeticError(msg)
        if all(c >= 0 for c in coefficients):
            positive.append(PositiveRoot(tuple(int(c) for c in coefficients), v))

    positive.sort(key=lambda root: (root.height, root.coefficients))

    cartan = tuple(
        tuple(2 * gram[i][j] / gram[i][i] for j in range(rank)) for i in range(rank)
    )
    weights = tuple(
        la.linear_combination(
            tuple(gram_inv[i][j] * lengths[i] / 2 for j in range(rank)),
            simple,
        )
        for i in range(rank)
    )

    rs = RootSystem(
        family=family,
        rank=rank,
        simple_roots=simple,
        positive_roots=tuple(positive),
        cartan_matrix=cartan,
        gram=gram,
        fundamental_weights=weights,
        fw_multipliers=_multipliers(family, rank),
    )
    logger.debug(f"Built root system {rs.name} with {len(positive)} positive roots")
    return rs


def expected_positive_root_count(family: Family, rank: int) -> int:
    match family:
        case Family.A:
            return rank * (rank + 1) // 2
        case Family.B | Family.C:
            return rank * rank
        case Family.D:
            return rank * (rank - 1)


def build_root_system(family: Family | str, rank: int) -> RootSystem:
    if not isinstance(family, Family):
        family = Family.from_str(family)

    if rank < family.min_rank():
        msg = f"Family {family.value} needs rank at least {family.min_rank()}, got {rank}."
        raise PreconditionViolated(msg)

    order = _weyl_order(family, rank)
    cap = gv.config.budgets.weyl_group_cap
    if order > cap:
        msg = f"{family.value}{rank} has a Weyl group of order {order}, above the cap of {cap}."
        raise RankTooLarge(msg)

    rs = _build(family, rank)
    if len(rs.positive_roots) != expected_positive_root_count(family, rank):
        msg = f"Reflection closure of {rs.name} produced the wrong number of roots."
        raise AssertionError(msg)
    return rs


def _weyl_order(family: Family, rank: int) -> int:
    match family:
        case Family.A:
            return math.factorial(rank + 1)
        case Family.B | Family.C:
            return 2**rank * math.factorial(rank)
        case Family.D:
            return 2 ** (rank - 1) * math.factorial(rank)


def _check_same(a: RootSystem, b: RootSystem) -> None:
    if not a.same_as(b):
        msg = f"Root systems differ: {a.name} vs {b.name}."
        raise MismatchedRootSystem(msg)


@dataclass(frozen=True, eq=False)
class ChamberVector:
    """An element Y of the Cartan space, stored by its coordinates over the simple roots."""

    rs: RootSystem
    root_coords: la.Vector

    def __post_init__(self) -> None:
        if len(self.root_coords) != self.rs.rank:
            msg = f"Expected {self.rs.rank} root coordinates, got {len(self.root_coords)}."
            raise ValueError(msg)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChamberVector):
            return NotImplemented
        return self.rs.same_as(other.rs) and self.root_coords == other.root_coords

    def __hash__(self) -> int:
        return hash((self.rs.name, self.root_coords))

    def __repr__(self) -> str:
        coords = ", ".join(la.format_fraction(x) for x in self.eval_coords)
        return f"ChamberVector({self.rs.name}, eval=({coords}))"

    @classmethod
    def from_root_coords(cls, rs: RootSystem, coords: Sequence) -> Self:
        return cls(rs, la.vec(coords))

    @classmethod
    def zero(cls, rs: RootSystem) -> Self:
        return cls(rs, la.zeros(rs.rank))

    @classmethod
    def from_eval_coords(cls, rs: RootSystem, values: Sequence) -> Self:
        values = la.vec(values)
        if len(values) != rs.rank:
            msg = f"Expected {rs.rank} evaluation coordinates, got {len(values)}."
            raise ValueError(msg)
        # omega_i(Y) = b_i <varpi_i, Y> = b_i t_i |alpha_i|^2 / 2
        return cls(
            rs,
            tuple(
                v * 2 / (b * length)
                for v, b, length in zip(values, rs.fw_multipliers, rs.root_lengths_squared, strict=True)
            ),
        )

    @classmethod
    def from_alpha_values(cls, rs: RootSystem, values: Sequence) -> Self:
        return cls(rs, la.mat_vec(rs.gram_inverse, la.vec(values)))

    @classmethod
    def from_ambient(cls, rs: RootSystem, vector: Sequence) -> Self:
        vector = la.vec(vector)
        result = cls.from_alpha_values(rs, tuple(la.dot(a, vector) for a in rs.simple_roots))
        if result.ambient != vector:
            msg = "Vector does not lie in the span of the simple roots."
            raise ValueError(msg)
        return result

    @classmethod
    def from_diag(cls, rs: RootSystem, diag: Sequence) -> Self:
        if not rs.is_type_a:
            msg = "Diagonal coordinates only exist in type A."
            raise ValueError(msg)
        diag = la.vec(diag)
        if len(diag) != rs.rank + 1 or sum(diag) != 0:
            msg = f"Expected {rs.rank + 1} diagonal entries summing to zero."
            raise ValueError(msg)
        return cls.from_ambient(rs, diag)

    @cached_property
    def ambient(self) -> la.Vector:
        return la.linear_combination(self.root_coords, self.rs.simple_roots)

    @cached_property
    def eval_coords(self) -> la.Vector:
        return tuple(
            b * t * length / 2
            for t, b, length in zip(
                self.root_coords, self.rs.fw_multipliers, self.rs.root_lengths_squared, strict=True
            )
        )

    @cached_property
    def alpha_values(self) -> la.Vector:
        return la.mat_vec(self.rs.gram, self.root_coords)

    @property
    def diag_coords(self) -> la.Vector:
        if not self.rs.is_type_a:
            msg = "Diagonal coordinates only exist in type A."
            raise ValueError(msg)
        return self.ambient

    @cached_property
    def norm_squared(self) -> Fraction:
        return la.dot(self.root_coords, self.alpha_values)

    def inner(self, other: "ChamberVector") -> Fraction:
        _check_same(self.rs, other.rs)
        return la.dot(self.root_coords, other.alpha_values)

    def pair(self, weight: la.Vector) -> Fraction:
        """<weight, Y> for an ambient weight vector."""
        return la.dot(weight, self.ambient)

    def in_negative_chamber(self) -> bool:
        return all(a <= 0 for a in self.alpha_values)

    def is_zero(self) -> bool:
        return all(t == 0 for t in self.root_coords)

    def precedes(self, other: "ChamberVector") -> bool:
        _check_same(self.rs, other.rs)
        return all(a <= b for a, b in zip(self.eval_coords, other.eval_coords, strict=True))

    def __add__(self, other: "ChamberVector") -> "ChamberVector":
        _check_same(self.rs, other.rs)
        return ChamberVector(self.rs, la.add(self.root_coords, other.root_coords))

    def __sub__(self, other: "ChamberVector") -> "ChamberVector":
        _check_same(self.rs, other.rs)
        return ChamberVector(self.rs, la.sub(self.root_coords, other.root_coords))

    def __neg__(self) -> "ChamberVector":
        return ChamberVector(self.rs, la.scale(self.root_coords, -1))

    def scaled(self, factor: Fraction | int) -> "ChamberVector":
        return ChamberVector(self.rs, la.scale(self.root_coords, factor))

    def to_dict(self) -> dict:
        result = {
            "root_system": self.rs.name,
            "root_coords": [la.format_fraction(x) for x in self.root_coords],
            "eval_coords": [la.format_fraction(x) for x in self.eval_coords],
        }
        if self.rs.is_type_a:
            result["diag_coords"] = [la.format_fraction(x) for x in self.diag_coords]
        return result

    @classmethod
    def from_dict(cls, data: dict, rs: RootSystem) -> Self:
        if data.get("root_system", rs.name) != rs.name:
            msg = f"Chamber vector belongs to {data['root_system']}, not {rs.name}."
            raise MismatchedRootSystem(msg)
        return cls.from_root_coords(rs, [la.parse_fraction(x) for x in data["root_coords"]])


@dataclass(frozen=True, eq=False)
class WeylElement:
    rs: RootSystem
    word: tuple[int, ...]
    matrix: la.Matrix

    @property
    def length(self) -> int:
        return len(self.word)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.rs.same_as(other.rs) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"WeylElement({self.rs.name}, word={self.word_text()})"

    def word_text(self) -> str:
        return "(" + ",".join(str(i + 1) for i in self.word) + ")"

    def act(self, v: la.Vector) -> la.Vector:
        return la.mat_vec(self.matrix, v)

    def inverse_act(self, v: la.Vector) -> la.Vector:
        # the matrix is orthogonal, so its inverse is its transpose
        return la.mat_vec(la.transpose(self.matrix), v)

    def one_line(self) -> tuple[int, ...]:
        """Type A only: w(i) (1-based) with M e_i = e_{w(i)}."""
        if not self.rs.is_type_a:
            msg = "One-line notation only exists in type A."
            raise ValueError(msg)
        n = self.rs.ambient_dim
        return tuple(
            next(j for j in range(n) if self.matrix[j][i] != 0) + 1 for i in range(n)
        )

    def to_dict(self) -> dict:
        result: dict = {"word": [i + 1 for i in self.word], "length": self.length}
        if self.rs.is_type_a:
            result["one_line"] = list(self.one_line())
        return result


def reflection_matrix(rs: RootSystem, i: int) -> la.Matrix:
    n = rs.ambient_dim
    return la.transpose(tuple(rs.reflect(i, la.unit(n, j)) for j in range(n)))


@cache
def _enumerate(rs: RootSystem) -> tuple[WeylElement, ...]:
    n = rs.ambient_dim
    generators = [reflection_matrix(rs, i) for i in range(rs.rank)]
    key_vector = rs.regular_dominant

    identity = WeylElement(rs, (), la.identity(n))
    seen = {key_vector: identity}
    queue = deque([identity])

    # breadth first, so the first word reaching an element is reduced
    while queue:
        element = queue.popleft()
        for i, generator in enumerate(generators):
            matrix = la.mat_mul(generator, element.matrix)
            key = la.mat_vec(matrix, key_vector)
            if key not in seen:
                fresh = WeylElement(rs, (i, *element.word), matrix)
                seen[key] = fresh
                queue.append(fresh)

    elements = tuple(seen.values())
    logger.debug(f"Enumerated {len(elements)} Weyl group elements of {rs.name}")
    return elements


def enumerate_weyl(rs: RootSystem) -> list[WeylElement]:
    order = rs.weyl_group_order()
    cap = gv.config.budgets.weyl_group_cap
    if order > cap:
        msg = f"W({rs.name}) has {order} elements, above the cap of {cap}."
        raise GroupTooLarge(msg)

    elements = _enumerate(rs)
    if len(elements) != order:
        msg = f"Enumerated {len(elements)} elements of W({rs.name}), expected {order}."
        raise AssertionError(msg)
    return list(elements)


def weyl_element(rs: RootSystem, word: Sequence[int]) -> WeylElement:
    """Build an element from a 0-based word without enumerating the group."""

    matrix = la.identity(rs.ambient_dim)
    for i in reversed(word):
        if not 0 <= i < rs.rank:
            msg = f"Reflection index {i + 1} out of range for {rs.name}."
            raise ValueError(msg)
        matrix = la.mat_mul(reflection_matrix(rs, i), matrix)

    for element in enumerate_weyl(rs):
        if element.matrix == matrix:
            return element

    msg = "Word does not define an element of the Weyl group."
    raise AssertionError(msg)


def longest_element(rs: RootSystem) -> WeylElement:
    return max(enumerate_weyl(rs), key=lambda w: w.length)


def weyl_act(w: WeylElement, y: ChamberVector) -> ChamberVector:
    """Y^w = (Ad w)^{-1} Y."""

    _check_same(w.rs, y.rs)
    return ChamberVector.from_ambient(y.rs, w.inverse_act(y.ambient))


def project_with_multipliers(y0: ChamberVector) -> tuple[ChamberVector, la.Vector]:
    """
    Orthogonal projection of y0 onto a^-, with the multipliers t >= 0 such that
    y0 - p(y0) = sum t_i alpha_i.
    """

    rs = y0.rs
    coords = list(y0.root_coords)

    for _ in range(rs.rank + 1):
        alpha = la.mat_vec(rs.gram, coords)
        active = [i for i in range(rs.rank) if alpha[i] >= 0]

        if all(alpha[i] == 0 for i in active):
            projected = ChamberVector(rs, tuple(coords))
            return projected, la.sub(y0.root_coords, projected.root_coords)

        sub_gram = tuple(tuple(rs.gram[i][j] for j in active) for i in active)
        step = la.solve(sub_gram, tuple(alpha[i] for i in active))
        for i, s in zip(active, step, strict=True):
            coords[i] -= s

    msg = "Chamber projection did not become stationary."
    raise AssertionError(msg)


def project_neg_chamber(y0: ChamberVector) -> ChamberVector:
    return project_with_multipliers(y0)[0]


def isotonic_regression(values: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Least-squares nondecreasing fit by pool adjacent violators."""

    blocks: list[list] = []  # [mean, weight]
    for v in values:
        blocks.append([v, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            mean2, weight2 = blocks.pop()
            mean1, weight1 = blocks[-1]
            weight = weight1 + weight2
            blocks[-1] = [(mean1 * weight1 + mean2 * weight2) / weight, weight]

    fitted: list = []
    for mean, weight in blocks:
        fitted.extend([mean] * weight)
    return tuple(fitted)


def project_type_a_pava(y0: ChamberVector) -> ChamberVector:
    return ChamberVector.from_diag(y0.rs, isotonic_regression(y0.diag_coords))


def type_a_convex_minorant(values: Sequence) -> tuple:
    """
    Greatest convex minorant of k -> values[k], sampled at the integers.
    Works for Fraction and float input alike.
    """

    if len(values) < 2 or values[0] != 0 or values[-1] != 0:  # noqa: PLR2004
        msg = "Convex minorant expects at least two values with v_0 = v_d = 0."
        raise BadEndpoints(msg)

    hull: list[tuple[int, object]] = []
    for k, v in enumerate(values):
        while len(hull) >= 2:  # noqa: PLR2004
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (v - y0) - (y1 - y0) * (k - x0) <= 0:
                hull.pop()
            else:
                break
        hull.append((k, v))

    result = list(values)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:], strict=False):
        for k in range(x0, x1 + 1):
            result[k] = y0 + (y1 - y0) * (k - x0) / (x1 - x0) if k != x0 else y0
    return tuple(result)


def project_type_a_minorant(y0: ChamberVector) -> ChamberVector:
    values = (Fraction(0), *y0.eval_coords, Fraction(0))
    return ChamberVector.from_eval_coords(y0.rs, type_a_convex_minorant(values)[1:-1])


def chamber_glb(vectors: Sequence[ChamberVector]) -> ChamberVector:
    if not vectors:
        msg = "Cannot take the greatest lower bound of an empty family."
        raise EmptyFamily(msg)
    rs = vectors[0].rs
    for y in vectors:
        _check_same(rs, y.rs)
    return ChamberVector.from_eval_coords(
        rs, tuple(min(values) for values in zip(*(y.eval_coords for y in vectors), strict=True))
    )


def chamber_sup(vectors: Sequence[ChamberVector]) -> ChamberVector:
    if not vectors:
        msg = "Cannot take the supremum of an empty family."
        raise EmptyFamily(msg)
    rs = vectors[0].rs
    for y in vectors:
        _check_same(rs, y.rs)
    result = ChamberVector.from_eval_coords(
        rs, tuple(max(values) for values in zip(*(y.eval_coords for y in vectors), strict=True))
    )
    if all(y.in_negative_chamber() for y in vectors):
        assert result.in_negative_chamber(), "sup of chamber vectors left the chamber"  # noqa: S101
    return result


class SeparatingRoot(NamedTuple):
    index: int
    tau: float
    omega_gap: float
    alpha_value: float


def _float_norm(v: la.Vector) -> float:
    return math.sqrt(float(la.dot(v, v)))


@cache
def separation_constant(rs: RootSystem) -> float:
    """
    tau for find_separating_root: the smaller of 1/(C1 C2 max|alpha|^2) * min(1, b_k|alpha_k|^2/2)
    and 1/(2K), K = sum_k 2 max(|alpha_k|/b_k, |varpi_k|) / |alpha_k|^2.
    """

    c1 = sum(_float_norm(a) for a in rs.simple_roots)
    c2 = max(
        sum(float(la.dot(yk, yj)) for yk in rs.dual_basis) for yj in rs.dual_basis
    )
    max_alpha = max(float(x) for x in rs.root_lengths_squared)
    scale_factor = min(
        1.0,
        min(b * float(x) / 2 for b, x in zip(rs.fw_multipliers, rs.root_lengths_squared, strict=True)),
    )
    tau_lemma = scale_factor / (c1 * c2 * max_alpha)

    k_const = sum(
        2 * max(_float_norm(a) / b, _float_norm(w)) / float(length)
        for a, w, b, length in zip(
            rs.simple_roots,
            rs.fundamental_weights,
            rs.fw_multipliers,
            rs.root_lengths_squared,
            strict=True,
        )
    )
    return min(tau_lemma, 1 / (2 * k_const))


def find_separating_root(y1: ChamberVector, y2: ChamberVector, eps: float | Fraction) -> SeparatingRoot:
    """
    For Y1 < Y2 in a^- with |Y2 - Y1| >= -log eps, find k with
    omega_k(Y1) <= omega_k(Y2) + tau log eps and alpha_k(Y1) <= tau log eps.
    """

    _check_same(y1.rs, y2.rs)
    eps = float(eps)
    if not 0 < eps < 1:
        msg = "eps must lie in (0, 1)."
        raise PreconditionViolated(msg)
    if not (y1.in_negative_chamber() and y2.in_negative_chamber()):
        msg = "Both vectors must lie in the negative chamber."
        raise PreconditionViolated(msg)
    if not y1.precedes(y2):
        msg = "Y1 must precede Y2."
        raise PreconditionViolated(msg)

    gap = y2 - y1
    log_eps = math.log(eps)
    if float(gap.norm_squared) < log_eps * log_eps:
        msg = f"|Y2 - Y1| = {math.sqrt(float(gap.norm_squared)):.6g} is smaller than -log eps = {-log_eps:.6g}."
        raise PreconditionViolated(msg)

    tau = separation_constant(y1.rs)
    bound = tau * log_eps

    candidates = [
        (min(float(gap.eval_coords[k]), float(gap.alpha_values[k])), k) for k in range(y1.rs.rank)
    ]
    _, k = max(candidates)

    omega_ok = float(y1.eval_coords[k]) <= float(y2.eval_coords[k]) + bound
    alpha_ok = float(y1.alpha_values[k]) <= bound
    if not (omega_ok and alpha_ok):
        msg = f"No separating root found for {y1} and {y2}."
        raise AssertionError(msg)

    return SeparatingRoot(
        index=k,
        tau=tau,
        omega_gap=float(gap.eval_coords[k]),
        alpha_value=float(y1.alpha_values[k]),
    )


def verify_stratification(rs: RootSystem, theta: frozenset[int]) -> bool:
    """Every level-(i+1) root is a level-1 root plus a level-i root."""

    by_level = {
        lvl: {root.coefficients for root in roots} for lvl, roots in rs.levels(theta).items()
    }
    if not by_level:
        return True

    level_one = by_level.get(1, set())
    for lvl in range(2, max(by_level) + 1):
        lower = by_level.get(lvl - 1, set())
        for beta in by_level.get(lvl, set()):
            if not any(
                tuple(b - a for a, b in zip(beta1, beta, strict=True)) in lower for beta1 in level_one
            ):
                return False
    return True
