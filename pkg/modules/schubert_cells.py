"""
Schubert cells of a flag variety: coset representatives of W_P, instability and the
exponents of algebraic points and subvarieties, plus the Grassmannian and quadric closed forms.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from . import exact_linalg as la
from .errors import InvalidFlagData
from .flag_exponents import (
    Exponent,
    FlagVarietySpec,
    beta_almost_sure,
    flow_element,
    format_exponent,
)
from .logger import logger
from .root_core import (
    ChamberVector,
    WeylElement,
    chamber_glb,
    enumerate_weyl,
    project_neg_chamber,
    type_a_convex_minorant,
    weyl_act,
)

if TYPE_CHECKING:
    from typing import Self


@dataclass(frozen=True)
class CellAnalysis:
    w: WeylElement
    Yw: ChamberVector  # noqa: N815
    pYw: ChamberVector  # noqa: N815
    gamma: Fraction
    beta: Exponent
    unstable: bool

    def to_dict(self) -> dict:
        return {
            "w_word": [i + 1 for i in self.w.word],
            "Yw": [la.format_fraction(x) for x in self.Yw.eval_coords],
            "pYw": [la.format_fraction(x) for x in self.pYw.eval_coords],
            "gamma": la.format_fraction(self.gamma),
            "beta": format_exponent(self.beta),
            "unstable": self.unstable,
        }


def _stabilizer_order(fv: FlagVarietySpec) -> int:
    y = flow_element(fv).ambient
    return sum(1 for w in enumerate_weyl(fv.rs) if w.act(y) == y)


def is_coset_rep(fv: FlagVarietySpec, w: WeylElement) -> bool:
    """w is the minimal representative of W_theta w iff w^-1 alpha_i > 0 for every i in theta."""
    return all(fv.rs.is_positive(w.inverse_act(fv.rs.simple_roots[i])) for i in fv.theta)


def coset_reps(fv: FlagVarietySpec) -> list[WeylElement]:
    group = enumerate_weyl(fv.rs)
    reps = [w for w in group if is_coset_rep(fv, w)]

    if len(reps) * _stabilizer_order(fv) != len(group):
        msg = f"Found {len(reps)} coset representatives for {fv.name}, which does not divide |W|."
        raise AssertionError(msg)

    reps.sort(key=lambda w: (w.length, w.word))
    return reps


def chi_twisted(fv: FlagVarietySpec, w: WeylElement) -> la.Vector:
    """chi^w, acting on weights the same way as on Y."""
    return w.inverse_act(fv.chi_vector)


def _beta_from_gamma(fv: FlagVarietySpec, gamma: Fraction) -> Exponent:
    denominator = -fv.pair(flow_element(fv)) - gamma
    if denominator < 0:
        msg = f"gamma = {gamma} exceeds -chi(Y) for {fv.name}."
        raise AssertionError(msg)
    if denominator == 0:
        return math.inf
    return 1 / denominator


def analyze_cell(fv: FlagVarietySpec, w: WeylElement) -> CellAnalysis:
    y = flow_element(fv)
    yw = weyl_act(w, y)
    pyw = project_neg_chamber(yw)

    gamma = -la.dot(chi_twisted(fv, w), pyw.ambient)
    unstable = any(value < 0 for value in yw.eval_coords)
    if unstable == pyw.is_zero():
        msg = f"Instability of {w} disagrees with its projection."
        raise AssertionError(msg)

    return CellAnalysis(
        w=w, Yw=yw, pYw=pyw, gamma=gamma, beta=_beta_from_gamma(fv, gamma), unstable=unstable
    )


def is_unstable(fv: FlagVarietySpec, w: WeylElement) -> bool:
    yw = weyl_act(w, flow_element(fv))
    return any(value < 0 for value in yw.eval_coords)


def _exponent_key(value: Exponent) -> tuple[int, Fraction]:
    if isinstance(value, float):
        return (1, Fraction(0))
    return (0, value)


def exponent_spectrum(fv: FlagVarietySpec) -> list[tuple[WeylElement, Exponent]]:
    """Every cell with its exponent, sorted by exponent (+inf last), then by word."""

    cells = [analyze_cell(fv, w) for w in coset_reps(fv)]
    logger.debug(f"Analyzed {len(cells)} cells of {fv.name}")
    cells.sort(key=lambda c: (_exponent_key(c.beta), c.w.length, c.w.word))
    return [(c.w, c.beta) for c in cells]


def spectrum_report(fv: FlagVarietySpec) -> list[CellAnalysis]:
    cells = [analyze_cell(fv, w) for w in coset_reps(fv)]
    cells.sort(key=lambda c: (_exponent_key(c.beta), c.w.length, c.w.word))
    return cells


def min_beta(fv: FlagVarietySpec) -> Exponent:
    """Smallest exponent among the cells outside the identity coset."""
    return min(
        (beta for w, beta in exponent_spectrum(fv) if w.length > 0),
        key=_exponent_key,
    )


def stability_rate(fv: FlagVarietySpec, cells: Sequence[WeylElement]) -> ChamberVector:
    return chamber_glb([analyze_cell(fv, w).pYw for w in cells])


def cells_below_threshold(fv: FlagVarietySpec, threshold: Exponent) -> list[WeylElement]:
    """Coset representatives w with <chi, Y^w> <= threshold."""
    y = flow_element(fv)
    return [w for w in coset_reps(fv) if fv.pair(weyl_act(w, y)) <= threshold]


def cell_from_inverse_one_line(fv: FlagVarietySpec, inverse: Sequence[int]) -> WeylElement:
    """The coset representative whose coset contains the type A element with w^-1 = inverse (1-based)."""

    n = fv.rs.ambient_dim
    if sorted(inverse) != list(range(1, n + 1)):
        msg = f"{list(inverse)} is not a permutation of 1..{n}."
        raise ValueError(msg)

    forward = [0] * n
    for i, image in enumerate(inverse, start=1):
        forward[image - 1] = i
    return cell_from_one_line(fv, forward)


def cell_from_one_line(fv: FlagVarietySpec, one_line: Sequence[int]) -> WeylElement:
    target = tuple(one_line)
    element = next((w for w in enumerate_weyl(fv.rs) if w.one_line() == target), None)
    if element is None:
        msg = f"{list(one_line)} is not an element of W({fv.rs.name})."
        raise ValueError(msg)

    y = flow_element(fv)
    yw = weyl_act(element, y)
    return next(w for w in coset_reps(fv) if weyl_act(w, y) == yw)


@dataclass(frozen=True)
class GrassFlagData:
    """
    A rational flag 0 = V_0 < V_{d_1} < ... < V_{d_r} = Q^d together with the
    generic intersection dimensions i_k = dim(V_{d_k} cap x) for x in Grass(ell, d).
    """

    d: int
    ell: int
    steps: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        d, ell = self.d, self.ell
        if not 1 <= ell < d:
            msg = f"Grassmannian data needs 1 <= l < d, got l={ell}, d={d}."
            raise InvalidFlagData(msg)
        if not self.steps:
            msg = "Flag data needs at least one step."
            raise InvalidFlagData(msg)

        prev_d, prev_i = 0, 0
        for dk, ik in self.steps:
            if dk <= prev_d:
                msg = f"Step dimensions must increase strictly, got {dk} after {prev_d}."
                raise InvalidFlagData(msg)
            if ik < prev_i or ik > min(ell, dk):
                msg = f"Intersection dimension {ik} invalid at step {dk}."
                raise InvalidFlagData(msg)
            if dk - ik < prev_d - prev_i:
                msg = f"Codimension d_k - i_k must be nondecreasing, failed at step {dk}."
                raise InvalidFlagData(msg)
            prev_d, prev_i = dk, ik

        if self.steps[-1] != (d, ell):
            msg = f"The last step must be ({d}, {ell}), got {self.steps[-1]}."
            raise InvalidFlagData(msg)

    @classmethod
    def create(cls, d: int, ell: int, steps: Iterable[Sequence[int]]) -> Self:
        return cls(d, ell, tuple((int(dk), int(ik)) for dk, ik in steps))

    @property
    def c_values(self) -> tuple[Fraction, ...]:
        """c_k = -i_k/l + (d_k - i_k)/(d - l), starting with c_0 = 0."""
        return (
            Fraction(0),
            *(Fraction(-ik, self.ell) + Fraction(dk - ik, self.d - self.ell) for dk, ik in self.steps),
        )

    @property
    def dims(self) -> tuple[int, ...]:
        return (0, *(dk for dk, _ in self.steps))

    def canonical(self) -> "GrassFlagData":
        """Keep only the steps that are strict vertices of the lower convex hull of (d_k, c_k)."""

        values: list[Fraction | None] = [None] * (self.d + 1)
        for dk, ck in zip(self.dims, self.c_values, strict=True):
            values[dk] = ck

        # fill the gaps linearly so the minorant is sampled on every integer
        points = [(dk, ck) for dk, ck in enumerate(values) if ck is not None]
        filled = [Fraction(0)] * (self.d + 1)
        for (x0, y0), (x1, y1) in zip(points, points[1:], strict=False):
            for x in range(x0, x1 + 1):
                filled[x] = y0 + (y1 - y0) * (x - x0) / (x1 - x0)

        minorant = type_a_convex_minorant(filled)
        kept = [
            (dk, ik)
            for (dk, ik), ck in zip(self.steps, self.c_values[1:], strict=True)
            if dk == self.d or (ck == minorant[dk] and _is_vertex(minorant, dk))
        ]
        return GrassFlagData(self.d, self.ell, tuple(kept))

    def to_dict(self) -> dict:
        return {"d": self.d, "l": self.ell, "steps": [list(step) for step in self.steps]}


def _is_vertex(values: Sequence[Fraction], x: int) -> bool:
    return 0 < x < len(values) - 1 and values[x - 1] + values[x + 1] != 2 * values[x]


def _gamma_by_blocks(data: GrassFlagData) -> Fraction:
    d, ell = data.d, data.ell
    total = Fraction(0)
    prev_d, prev_i = 0, 0
    for dk, ik in data.steps:
        di, dd = ik - prev_i, dk - prev_d
        total += Fraction(di, dd) * (Fraction(di, ell) - Fraction(dd - di, d - ell))
        prev_d, prev_i = dk, ik
    return total


def _gamma_by_squares(data: GrassFlagData) -> Fraction:
    d, ell = data.d, data.ell
    c = data.c_values
    dims = data.dims
    total = sum(
        ((c[k] - c[k - 1]) ** 2 / (dims[k] - dims[k - 1]) for k in range(1, len(c))),
        Fraction(0),
    )
    return Fraction(ell * (d - ell), d) * total


def grassmannian_gamma(data: GrassFlagData) -> Fraction:
    canonical = data.canonical()
    by_blocks = _gamma_by_blocks(canonical)
    by_squares = _gamma_by_squares(canonical)
    if by_blocks != by_squares:
        msg = f"Grassmannian exponent formulas disagree: {by_blocks} vs {by_squares}."
        raise AssertionError(msg)
    return by_squares


def grassmannian_beta_x(d: int, ell: int) -> Fraction:
    return Fraction(1, ell) + Fraction(1, d - ell)


def grassmannian_beta(data: GrassFlagData) -> Exponent:
    gamma = grassmannian_gamma(data)
    if gamma >= 1:
        return math.inf
    return grassmannian_beta_x(data.d, data.ell) / (1 - gamma)


def grassmannian_coset(data: GrassFlagData) -> WeylElement:
    """The cell of Grass(l, d) containing a generic subspace with the given intersection data."""

    fv = FlagVarietySpec.grassmannian(data.ell, data.d)

    # positions w^-1{1..l}: the new intersection dimensions sit at the end of each block
    positions: list[int] = []
    prev_i = 0
    for dk, ik in data.steps:
        positions.extend(range(dk - (ik - prev_i) + 1, dk + 1))
        prev_i = ik

    rest = [x for x in range(1, data.d + 1) if x not in positions]
    one_line = [0] * data.d
    for image, x in enumerate(sorted(positions) + rest, start=1):
        one_line[x - 1] = image
    return cell_from_one_line(fv, one_line)


def pencil_is_constraining(d: int, ell: int, dim_w: int, r: int) -> bool:
    return Fraction(r, dim_w) > Fraction(ell, d)


def is_proper_pencil(d: int, ell: int, dim_w: int, r: int) -> bool:
    """{x : dim(W cap x) >= r} is a proper subvariety of Grass(l, d)."""
    return 1 <= r <= min(ell, dim_w) and dim_w < d and r > ell + dim_w - d


def pencil_flag_data(d: int, ell: int, dim_w: int, r: int) -> GrassFlagData:
    if not is_proper_pencil(d, ell, dim_w, r):
        msg = f"(d={d}, l={ell}, dim W={dim_w}, r={r}) is not a proper pencil."
        raise InvalidFlagData(msg)
    return GrassFlagData(d, ell, ((dim_w, r), (d, ell)))


def quadric_point_exponent(d_m: int | float) -> Fraction:
    """1 + 1/d_M, where d_M is the dimension of the smallest rational isotropic subspace."""

    if isinstance(d_m, float):
        if math.isinf(d_m) and d_m > 0:
            return Fraction(1)
        msg = f"d_M must be a positive integer or +inf, got {d_m}."
        raise ValueError(msg)
    if d_m < 1:
        msg = f"d_M must be a positive integer or +inf, got {d_m}."
        raise ValueError(msg)
    return 1 + Fraction(1, d_m)


def rank_one_check(fv: FlagVarietySpec) -> bool:
    """For maximal parabolics no algebraic point beats the almost-sure exponent."""
    return min_beta(fv) >= beta_almost_sure(fv)
