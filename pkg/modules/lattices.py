"""
Lattices in R^d, their successive minima and the covolume profile c(g) of a lattice
read in the fundamental representations Lambda^k R^d.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import TYPE_CHECKING, NamedTuple

import mpmath
import numpy as np

from . import exact_linalg as la
from . import global_vars as gv
from .enums import Provenance
from .errors import EmptyFamily, GapNotCertified
from .lattice_reduction import (
    IntMatrix,
    float_gso,
    gram_schmidt,
    gso_axis,
    int_mat_mul,
    lattice_points,
    lll_reduce,
    mp_determinant,
    mp_mat_mul,
    saturating_basis,
    shortest_length_sq,
    working_precision,
)
from .logger import logger
from .root_core import ChamberVector, type_a_convex_minorant

if TYPE_CHECKING:
    from typing import Self

# relative slack when collecting candidates found with float Gram-Schmidt data
FLOAT_SLACK = 1e-7


def _is_exact_entry(x: object) -> bool:
    return isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool)


def _to_mp(x: object) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (np.integer, np.floating)):
        return mpmath.mpf(x.item())
    return mpmath.mpf(x)


def canonical_sign(x: Sequence[int]) -> tuple[int, ...]:
    """Flip x so that its first nonzero coordinate is positive."""
    for value in x:
        if value:
            return tuple(x) if value > 0 else tuple(-v for v in x)
    return tuple(x)


def log_unit_ball_volume(d: int) -> float:
    return (d / 2) * math.log(math.pi) - math.lgamma(d / 2 + 1)


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """The lattice diag(e^{log_scales}) * basis * Z^d, generated by the columns of basis."""

    basis: tuple[tuple, ...]
    provenance: Provenance
    log_scales: tuple[float, ...]

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], log_scales: Sequence[float] | None = None) -> Self:
        rows = [list(row) for row in matrix]
        d = len(rows)
        if d == 0 or any(len(row) != d for row in rows):
            msg = "A lattice basis must be a nonempty square matrix."
            raise ValueError(msg)

        if all(_is_exact_entry(x) for row in rows for x in row):
            basis = tuple(tuple(la.to_fraction(int(x) if isinstance(x, np.integer) else x) for x in row) for row in rows)
            provenance = Provenance.EXACT
        else:
            with mpmath.workdps(working_precision()):
                basis = tuple(tuple(_to_mp(x) for x in row) for row in rows)
            provenance = Provenance.FLOAT

        scales = tuple(float(s) for s in log_scales) if log_scales is not None else (0.0,) * d
        if len(scales) != d:
            msg = f"Expected {d} log scales, got {len(scales)}."
            raise ValueError(msg)

        lattice = cls(basis, provenance, scales)
        if lattice.log_covolume() == -math.inf:
            msg = "Lattice basis is singular."
            raise ValueError(msg)
        return lattice

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_exact(self) -> bool:
        return self.provenance == Provenance.EXACT and not any(self.log_scales)

    def with_scales(self, log_scales: Sequence[float]) -> "LatticeBasis":
        return LatticeBasis(self.basis, self.provenance, tuple(float(s) for s in log_scales))

    def dilated(self, factor: float) -> "LatticeBasis":
        log_factor = math.log(factor)
        return self.with_scales(tuple(s + log_factor for s in self.log_scales))

    @cached_property
    def _generators(self) -> list[list]:
        return [[self.basis[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def rows_mp(self) -> list[list[mpmath.mpf]]:
        """Generators as scaled row vectors."""
        with mpmath.workdps(working_precision()):
            factors = [mpmath.exp(mpmath.mpf(s)) for s in self.log_scales]
            return [[_to_mp(x) * f for x, f in zip(row, factors, strict=True)] for row in self._generators]

    def vector(self, x: Sequence[int]) -> list:
        """The unscaled vector sum x_i g_i (exact entries stay Fractions)."""
        d = self.dim
        with mpmath.workdps(working_precision()):
            return [
                sum((x[i] * self._generators[i][j] for i in range(d) if x[i]), start=0)
                for j in range(d)
            ]

    def log_norm(self, x: Sequence[int]) -> float:
        """log |a v| computed as half a log-sum-exp of 2 s_j + 2 log|v_j|."""

        with mpmath.workdps(working_precision()):
            terms = [
                2 * mpmath.mpf(s) + 2 * mpmath.log(abs(_to_mp(v)))
                for v, s in zip(self.vector(x), self.log_scales, strict=True)
                if v != 0
            ]
            if not terms:
                return -math.inf
            top = max(terms)
            total = top + mpmath.log(mpmath.fsum(mpmath.exp(t - top) for t in terms))
            return float(total / 2)

    def length_key(self, x: Sequence[int]) -> tuple:
        if self.is_exact:
            v = self.vector(x)
            return (sum((c * c for c in v), start=Fraction(0)), tuple(x))
        return (round(self.log_norm(x), 10), tuple(x))

    def log_covolume(self) -> float:
        return self._log_abs_det + sum(self.log_scales)

    @cached_property
    def _log_abs_det(self) -> float:
        if self.provenance == Provenance.EXACT:
            det = la.determinant(self.basis)
            return -math.inf if det == 0 else math.log(abs(det))
        with mpmath.workdps(working_precision()):
            det = mp_determinant(self.basis)
            return -math.inf if det == 0 else float(mpmath.log(abs(det)))

    def reduce(self, transform: IntMatrix | None = None) -> "ReducedLattice":
        """LLL-reduce, optionally starting from a transform that reduced a nearby lattice."""

        base = self.rows_mp()
        start = mp_mat_mul(transform, base) if transform is not None else base
        rows, u = lll_reduce(start)
        total = int_mat_mul(u, transform) if transform is not None else u
        return ReducedLattice(self, total, rows)

    def to_dict(self) -> dict:
        if self.provenance == Provenance.EXACT:
            basis = [[la.format_fraction(x) for x in row] for row in self.basis]
        else:
            basis = [[f"{float(x):.12g}" for x in row] for row in self.basis]
        return {"basis": basis, "provenance": self.provenance.value, "log_scales": list(self.log_scales)}


@dataclass(frozen=True, eq=False)
class ReducedLattice:
    lattice: LatticeBasis
    transform: IntMatrix  # reduced row i = sum_j transform[i][j] * generator_j
    rows: list[list[mpmath.mpf]]

    @cached_property
    def gso(self) -> tuple[np.ndarray, np.ndarray]:
        return float_gso(self.rows)

    @cached_property
    def axis(self) -> np.ndarray:
        """Highest-weight coordinate of each Gram-Schmidt vector."""
        return gso_axis(self.rows)

    def original(self, z: Sequence[int]) -> tuple[int, ...]:
        n = len(z)
        return tuple(sum(z[i] * self.transform[i][j] for i in range(n)) for j in range(n))

    def row_log_norm(self, i: int) -> float:
        return self.lattice.log_norm(self.transform[i])

    def points_within(self, radius: float) -> list[tuple[int, ...]]:
        """Original coordinates of every lattice vector of norm <= radius, one per +- pair."""
        mu, bsq = self.gso
        return [self.original(z) for _, z in lattice_points(mu, bsq, radius * (1 + FLOAT_SLACK))]


class MinimumVector(NamedTuple):
    log_norm: float
    coords: tuple[int, ...]

    @property
    def norm(self) -> float:
        return math.exp(self.log_norm)


def _row_norm(row: Sequence[mpmath.mpf]) -> float:
    with mpmath.workdps(working_precision()):
        return float(mpmath.sqrt(mpmath.fdot(row, row)))


def _adapted_rows(
    rows: list[list[mpmath.mpf]], span: int
) -> tuple[list[list[mpmath.mpf]], IntMatrix]:
    """
    Reduce the first span rows among themselves and the rest modulo their span.
    Returns (rows, T) with new rows = T * rows, T unimodular block triangular.
    """

    n = len(rows)
    head, u_head = lll_reduce(rows[:span])

    with mpmath.workdps(working_precision()):
        mu_head, bsq_head = gram_schmidt(head)
        bstar: list[list[mpmath.mpf]] = []
        for i, row in enumerate(head):
            v = list(row)
            for j in range(i):
                v = [x - mu_head[i][j] * y for x, y in zip(v, bstar[j], strict=True)]
            bstar.append(v)

        def project_out(row: list[mpmath.mpf]) -> list[mpmath.mpf]:
            v = list(row)
            for b, norm_sq in zip(bstar, bsq_head, strict=True):
                c = mpmath.fdot(row, b) / norm_sq
                v = [x - c * y for x, y in zip(v, b, strict=True)]
            return v

        _, u_tail = lll_reduce([project_out(row) for row in rows[span:]])
        tail = mp_mat_mul(u_tail, rows[span:])

        # size-reduce the tail against the head
        tail_shift: IntMatrix = []
        for t, row in enumerate(tail):
            coeffs = [mpmath.fdot(row, b) / norm_sq for b, norm_sq in zip(bstar, bsq_head, strict=True)]
            y = [mpmath.mpf(0)] * span
            for j in range(span - 1, -1, -1):
                y[j] = coeffs[j] - mpmath.fsum(y[i] * mu_head[i][j] for i in range(j + 1, span))
            shift = [int(mpmath.nint(v)) for v in y]
            tail[t] = [
                x - mpmath.fsum(s * h[k] for s, h in zip(shift, head, strict=True))
                for k, x in enumerate(row)
            ]
            tail_shift.append(shift)

    transform: IntMatrix = [[0] * n for _ in range(n)]
    for i in range(span):
        for j in range(span):
            transform[i][j] = u_head[i][j]
    for t in range(n - span):
        for j in range(n - span):
            transform[span + t][span + j] = u_tail[t][j]
        # shift rows are expressed over the reduced head, map them back through u_head
        for j in range(span):
            transform[span + t][j] = -sum(tail_shift[t][i] * u_head[i][j] for i in range(span))

    return head + tail, transform


def successive_minima_vectors(
    lattice: LatticeBasis, upto: int | None = None, reduced: ReducedLattice | None = None
) -> list[MinimumVector]:
    """
    lambda_1..lambda_upto with a realizing vector each. Vector i is the shortest lattice vector
    outside the span of the previous ones, ties broken on (squared length, coordinates).
    """

    n = lattice.dim
    upto = n if upto is None else upto
    if not 0 <= upto <= n:
        msg = f"Can only take up to {n} successive minima."
        raise ValueError(msg)

    red = reduced or lattice.reduce()
    chosen_reduced: list[tuple[int, ...]] = []
    result: list[MinimumVector] = []

    for i in range(upto):
        if i == 0:
            rows, to_reduced = red.rows, None
        else:
            w = saturating_basis(chosen_reduced, n)
            adapted, t = _adapted_rows(mp_mat_mul(w, red.rows), i)
            rows, to_reduced = adapted, int_mat_mul(t, w)

        bound = min(_row_norm(row) for row in rows[i:])
        if i == 0:
            minkowski = math.exp(
                math.log(2) + (lattice.log_covolume() - log_unit_ball_volume(n)) / n
            )
            bound = min(bound, minkowski)

        mu, bsq = float_gso(rows)
        best = shortest_length_sq(mu, bsq, bound * (1 + FLOAT_SLACK), span=i)
        if best is None:
            msg = "Enumeration found no vector below a basis vector length."
            raise AssertionError(msg)

        candidates = lattice_points(mu, bsq, math.sqrt(best) * (1 + FLOAT_SLACK), span=i)
        options = []
        for _, z in candidates:
            z_red = z if to_reduced is None else tuple(
                sum(z[a] * to_reduced[a][b] for a in range(n)) for b in range(n)
            )
            x = canonical_sign(red.original(z_red))
            options.append((lattice.length_key(x), x, z_red))

        _, x, z_red = min(options)
        chosen_reduced.append(z_red)
        result.append(MinimumVector(lattice.log_norm(x), x))

    return result


def successive_minima(lattice: LatticeBasis, upto: int | None = None) -> tuple[float, ...]:
    return tuple(m.norm for m in successive_minima_vectors(lattice, upto))


class MinkowskiReport(NamedTuple):
    holds: bool
    ratio: float
    lower: float
    upper: float


def minkowski_check(lattice: LatticeBasis, minima: Sequence[MinimumVector] | None = None) -> MinkowskiReport:
    """vol(B_d) * lambda_1...lambda_d / covol must lie in [2^d/d!, 2^d]."""

    d = lattice.dim
    minima = minima or successive_minima_vectors(lattice)
    log_ratio = log_unit_ball_volume(d) + sum(m.log_norm for m in minima) - lattice.log_covolume()
    log_lower = d * math.log(2) - math.lgamma(d + 1)
    log_upper = d * math.log(2)
    holds = log_lower - 1e-9 <= log_ratio <= log_upper + 1e-9
    return MinkowskiReport(holds, math.exp(log_ratio), math.exp(log_lower), math.exp(log_upper))


def wedge_subsets(d: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(d), k))


def wedge_lattice(lattice: LatticeBasis, k: int) -> LatticeBasis:
    """Lambda^k of the lattice in the basis e_I, I running over k-subsets in lexicographic order."""

    d = lattice.dim
    if not 1 <= k <= d:
        msg = f"Wedge power {k} out of range for dimension {d}."
        raise ValueError(msg)

    subsets = wedge_subsets(d, k)
    basis = lattice.basis
    if lattice.provenance == Provenance.EXACT:
        entries = [
            [la.determinant([[basis[r][c] for c in cols] for r in rows]) for cols in subsets]
            for rows in subsets
        ]
    else:
        with mpmath.workdps(working_precision()):
            entries = [
                [
                    mp_determinant([[basis[r][c] for c in cols] for r in rows])
                    for cols in subsets
                ]
                for rows in subsets
            ]

    scales = [sum(lattice.log_scales[r] for r in rows) for rows in subsets]
    result = LatticeBasis(tuple(tuple(row) for row in entries), lattice.provenance, tuple(scales))
    if result.log_covolume() == -math.inf:
        msg = "Wedge lattice is singular."
        raise AssertionError(msg)
    return result


def wedge_coordinates(vectors: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Pluecker coordinates of the span of k integer vectors."""
    k = len(vectors)
    d = len(vectors[0])
    return tuple(
        la.int_determinant([[row[c] for c in cols] for row in vectors]) for cols in wedge_subsets(d, k)
    )


def _signed_subset(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    if len(set(indices)) < len(indices):
        return 0, ()
    items = list(indices)
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


def is_decomposable(p: Sequence[int], d: int, k: int) -> bool:
    """Exact Pluecker relations for an integer k-vector in Lambda^k Z^d."""

    if k <= 1 or k >= d - 1:
        return any(p)

    position = {subset: i for i, subset in enumerate(wedge_subsets(d, k))}

    def coordinate(indices: Sequence[int]) -> int:
        sign, key = _signed_subset(indices)
        return sign * p[position[key]] if sign else 0

    for low in combinations(range(d), k - 1):
        for high in combinations(range(d), k + 1):
            total = 0
            for idx, j in enumerate(high):
                rest = high[:idx] + high[idx + 1 :]
                term = coordinate((*low, j)) * coordinate(rest)
                total += -term if idx % 2 else term
            if total:
                return False
    return any(p)


def decomposable_points(
    wedge: LatticeBasis, d: int, k: int, radius: float, reduced: ReducedLattice | None = None
) -> list[tuple[int, ...]]:
    red = reduced or wedge.reduce()
    return [
        canonical_sign(p) for p in red.points_within(radius) if is_decomposable(p, d, k)
    ]


def covolume_minimum(
    lattice: LatticeBasis,
    k: int,
    reduced: ReducedLattice | None = None,
    wedge_reduced: ReducedLattice | None = None,
) -> MinimumVector:
    """mu_k: the smallest covolume of a rank-k sublattice, with its Pluecker vector."""

    d = lattice.dim
    red = reduced or lattice.reduce()
    if k == 1:
        return successive_minima_vectors(lattice, 1, red)[0]

    wedge = wedge_reduced.lattice if wedge_reduced is not None else wedge_lattice(lattice, k)
    start = canonical_sign(wedge_coordinates(red.transform[:k]))
    radius = math.exp(wedge.log_norm(start))

    candidates = decomposable_points(wedge, d, k, radius, wedge_reduced)
    candidates.append(start)
    best = min(candidates, key=wedge.length_key)
    return MinimumVector(wedge.log_norm(best), best)


@dataclass(frozen=True)
class ChamberPoint:
    """A float point of the type A Cartan space, stored by omega_1..omega_{d-1}."""

    eval_coords: tuple[float, ...]

    @classmethod
    def from_chamber_vector(cls, y: ChamberVector) -> Self:
        if not y.rs.is_type_a:
            msg = "Float chamber points are only used in type A."
            raise ValueError(msg)
        return cls(tuple(float(v) for v in y.eval_coords))

    @classmethod
    def projection_of(cls, values: Sequence[float]) -> Self:
        minorant = type_a_convex_minorant((0.0, *(float(v) for v in values), 0.0))
        return cls(tuple(float(v) for v in minorant[1:-1]))

    @property
    def profile(self) -> tuple[float, ...]:
        return (0.0, *self.eval_coords, 0.0)

    @property
    def alpha_values(self) -> tuple[float, ...]:
        f = self.profile
        return tuple(2 * f[k] - f[k - 1] - f[k + 1] for k in range(1, len(f) - 1))

    @property
    def diag_coords(self) -> tuple[float, ...]:
        f = self.profile
        return tuple(f[k] - f[k - 1] for k in range(1, len(f)))

    @property
    def norm(self) -> float:
        return math.hypot(*self.diag_coords)

    def distance(self, other: "ChamberPoint") -> float:
        return (self - other).norm

    def __sub__(self, other: "ChamberPoint") -> "ChamberPoint":
        return ChamberPoint(tuple(a - b for a, b in zip(self.eval_coords, other.eval_coords, strict=True)))

    def scaled(self, factor: float) -> "ChamberPoint":
        return ChamberPoint(tuple(v * factor for v in self.eval_coords))

    def to_dict(self) -> dict:
        return {"eval_coords": [float(f"{v:.12g}") for v in self.eval_coords]}


@dataclass(frozen=True)
class LatticePosition:
    c0: tuple[float, ...]
    c: ChamberPoint
    minimizers: tuple[tuple[int, ...], ...]
    exact: tuple[bool, ...] = field(default=())

    @property
    def c0_point(self) -> ChamberPoint:
        return ChamberPoint(self.c0)

    @property
    def distance_to_chamber(self) -> float:
        return self.c0_point.distance(self.c)

    def to_dict(self) -> dict:
        result = {
            "c0": [float(f"{v:.12g}") for v in self.c0],
            "c": self.c.to_dict()["eval_coords"],
            "minimizers": [list(p) for p in self.minimizers],
        }
        if self.exact:
            result["exact"] = list(self.exact)
        return result


def _as_lattice(g: LatticeBasis | Sequence[Sequence]) -> LatticeBasis:
    return g if isinstance(g, LatticeBasis) else LatticeBasis.from_matrix(g)


def c_of_lattice(
    g: LatticeBasis | Sequence[Sequence],
    reduced: ReducedLattice | None = None,
    wedges: dict[int, ReducedLattice] | None = None,
) -> LatticePosition:
    """omega_k(c0) = log mu_k - (k/d) log covol; c is the projection of c0 onto a^-."""

    lattice = _as_lattice(g)
    d = lattice.dim
    red = reduced or lattice.reduce()
    wedges = wedges or {}
    log_covol = lattice.log_covolume()

    values = []
    minimizers = []
    for k in range(1, d):
        minimum = covolume_minimum(lattice, k, red, wedges.get(k))
        values.append(minimum.log_norm - k * log_covol / d)
        minimizers.append(minimum.coords)

    return LatticePosition(tuple(values), ChamberPoint.projection_of(values), tuple(minimizers))


def c_of_set(
    samples: Sequence[LatticeBasis | Sequence[Sequence]],
    positions: Sequence[LatticePosition] | None = None,
) -> LatticePosition:
    """
    mu_k(S) = min over decomposable p of max over g in S of |g p| (covolume-normalized).
    positions, when given, are the already computed c_of_lattice of each sample.
    """

    if not samples:
        msg = "c_of_set needs at least one sample."
        raise EmptyFamily(msg)

    lattices = [_as_lattice(g) for g in samples]
    d = lattices[0].dim
    if any(lat.dim != d for lat in lattices):
        msg = "All samples must have the same dimension."
        raise ValueError(msg)

    if positions is None:
        positions = [c_of_lattice(lat) for lat in lattices]
    elif len(positions) != len(lattices):
        msg = "Need one position per sample."
        raise ValueError(msg)
    log_covols = [lat.log_covolume() for lat in lattices]
    log_cap = math.log(gv.config.lab.set_search_radius)

    values, minimizers, exact = [], [], []
    for k in range(1, d):
        wedges = [wedge_lattice(lat, k) for lat in lattices]

        def worst(p: tuple[int, ...], wedges: list[LatticeBasis] = wedges, k: int = k) -> float:
            return max(w.log_norm(p) - k * c / d for w, c in zip(wedges, log_covols, strict=True))

        candidates = {pos.minimizers[k - 1] for pos in positions}
        best_value, best = min((worst(p), p) for p in candidates)

        radius_log = min(best_value, log_cap)
        radius = math.exp(radius_log + k * log_covols[0] / d)
        for p in decomposable_points(wedges[0], d, k, radius):
            value = worst(p)
            if (value, p) < (best_value, best):
                best_value, best = value, p

        values.append(best_value)
        minimizers.append(best)
        exact.append(best_value <= log_cap)

    logger.debug(f"Computed set covolumes over {len(lattices)} samples")
    return LatticePosition(
        tuple(values), ChamberPoint.projection_of(values), tuple(minimizers), tuple(exact)
    )


class FlagStep(NamedTuple):
    k: int
    vector: tuple[int, ...]
    alpha: float


def partial_flag_detect(
    g: LatticeBasis | Sequence[Sequence], threshold: float | None = None
) -> list[FlagStep]:
    """
    Every k with alpha_k(c(g)) <= -threshold, with its minimizing k-vector, after checking
    that no other decomposable vector comes within gap_constant * e^{-alpha_k} mu_k.
    """

    lattice = _as_lattice(g)
    threshold = gv.config.lab.flag_threshold if threshold is None else threshold
    if threshold <= 0:
        msg = "The flag threshold must be positive."
        raise ValueError(msg)

    d = lattice.dim
    position = c_of_lattice(lattice)
    log_covol = lattice.log_covolume()
    gap = math.log(gv.config.lab.gap_constant)

    steps = []
    for k, alpha in enumerate(position.c.alpha_values, start=1):
        if alpha > -threshold:
            continue

        p = position.minimizers[k - 1]
        wedge = wedge_lattice(lattice, k)
        radius = math.exp(gap - alpha + position.c0[k - 1] + k * log_covol / d)
        # multiples of p span the same subspace
        rivals = [q for q in decomposable_points(wedge, d, k, radius) if la.rank([p, q]) > 1]
        if rivals:
            msg = f"Cannot certify a unique minimizer in degree {k}: {len(rivals)} rival vectors."
            raise GapNotCertified(msg)

        steps.append(FlagStep(k, p, alpha))

    return steps
