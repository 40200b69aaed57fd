"""
Basis reduction and short-vector enumeration.

Bases are lists of row vectors. Reduction runs in fplll on an integer image of the rows,
and the unimodular transform it returns is applied to the rows at the configured mpmath
precision. Enumeration runs on float64 Gram-Schmidt data computed from the high-precision
basis, so strongly skewed lattices (as met along diagonal flows) keep accurate projection
coefficients.
"""

import math
from collections.abc import Callable, Sequence

import mpmath
import numpy as np
from fpylll import LLL, IntegerMatrix

from . import global_vars as gv
from .errors import EnumerationBudgetExceeded

IntMatrix = list[list[int]]

# relative float tolerance of the cone pruning
CONE_SLACK = 1e-7


def working_precision() -> int:
    return gv.config.lab.mp_dps


def gram_schmidt(rows: Sequence[Sequence[mpmath.mpf]]) -> tuple[list[list[mpmath.mpf]], list[mpmath.mpf]]:
    """Gram-Schmidt coefficients mu[i][j] (j < i) and squared lengths |b*_i|^2."""

    n = len(rows)
    mu = [[mpmath.mpf(0)] * n for _ in range(n)]
    bstar: list[list[mpmath.mpf]] = []
    bsq: list[mpmath.mpf] = []

    for i in range(n):
        v = list(rows[i])
        for j in range(i):
            mu[i][j] = mpmath.fdot(rows[i], bstar[j]) / bsq[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j], strict=True)]
        norm_sq = mpmath.fdot(v, v)
        if norm_sq == 0:
            msg = "Basis vectors are linearly dependent."
            raise ValueError(msg)
        bstar.append(v)
        bsq.append(norm_sq)

    return mu, bsq


def mp_determinant(rows: Sequence[Sequence]) -> mpmath.mpf:
    """
    Determinant by Gaussian elimination with partial pivoting at the working precision.
    A column with no nonzero pivot candidate gives 0 instead of an error.
    """

    with mpmath.workdps(working_precision()):
        a = [[mpmath.mpf(x) for x in row] for row in rows]
        n = len(a)
        det = mpmath.mpf(1)
        for i in range(n):
            column = [abs(a[r][i]) for r in range(i, n)]
            pivot = i + column.index(max(column))
            if a[pivot][i] == 0:
                return mpmath.mpf(0)
            if pivot != i:
                a[i], a[pivot] = a[pivot], a[i]
                det = -det
            det *= a[i][i]
            for r in range(i + 1, n):
                factor = a[r][i] / a[i][i]
                if factor:
                    a[r] = [x - factor * y for x, y in zip(a[r], a[i], strict=True)]
        return det


def _scaled_integer_rows(rows: Sequence[Sequence[mpmath.mpf]]) -> list[list[int]]:
    """Rows rounded to integers after scaling the largest entry to about 2^prec."""

    largest = max((abs(x) for row in rows for x in row), default=mpmath.mpf(0))
    if largest == 0:
        msg = "Basis vectors are linearly dependent."
        raise ValueError(msg)
    shift = mpmath.mp.prec - int(mpmath.floor(mpmath.log(largest, 2)))
    scale = mpmath.ldexp(1, shift)
    return [[int(mpmath.nint(x * scale)) for x in row] for row in rows]


def lll_reduce(
    rows: Sequence[Sequence], delta: float = 0.99
) -> tuple[list[list[mpmath.mpf]], IntMatrix]:
    """
    LLL-reduce the rows. Returns (reduced rows, U) with reduced = U * rows and U unimodular.

    fplll reduces an integer image of the rows scaled to the working precision, U is then
    applied to the high-precision rows. Used as preprocessing only: enumeration does not
    rely on any reduction guarantee.
    """

    n = len(rows)
    with mpmath.workdps(working_precision()):
        b = [[mpmath.mpf(x) for x in row] for row in rows]
        u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        if n < 2:  # noqa: PLR2004
            gram_schmidt(b)
            return b, u

        scaled = IntegerMatrix.from_matrix(_scaled_integer_rows(b))
        transform = IntegerMatrix.identity(n)
        LLL.reduction(scaled, transform, delta=delta)
        u = [[int(transform[i, j]) for j in range(n)] for i in range(n)]

        reduced = mp_mat_mul(u, b)
        gram_schmidt(reduced)
        return reduced, u


def int_mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return [[sum(x * y for x, y in zip(row, col, strict=True)) for col in zip(*b, strict=True)] for row in a]


def mp_mat_mul(a: IntMatrix, b: Sequence[Sequence[mpmath.mpf]]) -> list[list[mpmath.mpf]]:
    with mpmath.workdps(working_precision()):
        return [
            [mpmath.fsum(x * y for x, y in zip(row, col, strict=True)) for col in zip(*b, strict=True)]
            for row in a
        ]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def saturating_basis(coords: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """
    An integer unimodular W whose first m rows span the saturation of the rows of coords
    (m independent integer vectors in Z^n), i.e. Q-span(coords) cap Z^n.
    """

    a = [list(row) for row in coords]
    m = len(a)
    w = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    # column operations a <- a E reduce a to [H | 0]; w tracks E^-1 as row operations
    for i in range(m):
        for j in range(i + 1, n):
            if a[i][j] == 0:
                continue
            x, y = a[i][i], a[i][j]
            g, p, q = _xgcd(x, y)
            xg, yg = x // g, y // g
            for row in a:
                ci, cj = row[i], row[j]
                row[i], row[j] = p * ci + q * cj, -yg * ci + xg * cj
            wi, wj = w[i], w[j]
            w[i] = [xg * s + yg * t for s, t in zip(wi, wj, strict=True)]
            w[j] = [-q * s + p * t for s, t in zip(wi, wj, strict=True)]
        if a[i][i] == 0:
            msg = "Coordinate vectors are linearly dependent."
            raise ValueError(msg)

    return w


def float_gso(rows: Sequence[Sequence[mpmath.mpf]]) -> tuple[np.ndarray, np.ndarray]:
    with mpmath.workdps(working_precision()):
        mu, bsq = gram_schmidt(rows)
        return (
            np.array([[float(x) for x in row] for row in mu], dtype=np.float64),
            np.array([float(x) for x in bsq], dtype=np.float64),
        )


def gso_axis(rows: Sequence[Sequence[mpmath.mpf]], axis: int = 0) -> np.ndarray:
    """Coordinate axis of every Gram-Schmidt vector b*_j."""

    with mpmath.workdps(working_precision()):
        mu, _ = gram_schmidt(rows)
        values: list[mpmath.mpf] = []
        for j, row in enumerate(rows):
            values.append(row[axis] - mpmath.fsum(mu[j][i] * values[i] for i in range(j)))
        return np.array([float(x) for x in values], dtype=np.float64)


class _Cone:
    """
    Prunes subtrees holding no vector with |v_axis| >= c |v|.

    Below level l the free part of v lies in span(b_0, ..., b_{l-1}), whose projection of the
    axis has length reach[l]. With A the axis component and P the squared length of the
    fixed part, every completion satisfies |v_axis| <= A + reach * sqrt(|v|^2 - P), which
    stays below c |v| once reach < c and A <= sqrt(P (c^2 - reach^2)).
    """

    def __init__(self, axis: np.ndarray, bsq: np.ndarray, constant: float) -> None:
        self.axis = axis
        self.constant = constant
        cosines = np.concatenate(([0.0], np.cumsum(axis * axis / bsq)))
        self.reach = np.sqrt(np.minimum(cosines, 1.0))

    def misses(self, level: int, partial: float, component: float, magnitude: float) -> bool:
        c = self.constant
        reach = float(self.reach[level])
        if reach >= c * (1 - CONE_SLACK):
            return False
        bound = math.sqrt(partial * (c * c - reach * reach))
        return abs(component) + CONE_SLACK * magnitude <= bound * (1 - CONE_SLACK)


class _Search:
    """
    Depth-first enumeration of integer z with |sum z_i b_i|^2 <= radius_sq.

    Only one of +-z is visited (the highest nonzero coordinate is positive), and vectors
    with z_j = 0 for every j >= span are skipped, so span = m excludes the sublattice
    generated by the first m basis vectors. With shrink, every accepted leaf lowers the
    radius to its own length (times 1 + slack).
    """

    def __init__(  # noqa: PLR0913
        self,
        mu: np.ndarray,
        bsq: np.ndarray,
        radius_sq: float,
        span: int,
        budget: int,
        *,
        shrink: bool,
        slack: float = 0.0,
        cone: _Cone | None = None,
        accept: Callable[[tuple[int, ...]], bool] | None = None,
    ) -> None:
        self.mu = mu
        self.bsq = bsq
        self.radius_sq = radius_sq
        self.span = span
        self.budget = budget
        self.shrink = shrink
        self.slack = slack
        self.cone = cone
        self.accept = accept
        self.n = len(bsq)
        self.z = [0] * self.n
        self.nodes = 0
        self.found: list[tuple[float, tuple[int, ...]]] = []

    def run(self) -> None:
        if self.n:
            self._visit(self.n - 1, 0.0, 0.0, 0.0, all_zero_above=True)

    def _visit(  # noqa: C901, PLR0913
        self, level: int, partial: float, component: float, magnitude: float, *, all_zero_above: bool
    ) -> None:
        if all_zero_above and level == self.span - 1:
            return

        center = -sum(self.mu[j][level] * self.z[j] for j in range(level + 1, self.n))
        weight = self.bsq[level]
        nearest = round(center)

        offset = 0
        while True:
            if offset > 0 and weight * (offset - 0.5) ** 2 > self.radius_sq - partial:
                break
            values = (nearest,) if offset == 0 else (nearest + offset, nearest - offset)
            offset += 1

            for value in values:
                if all_zero_above and value < 0:
                    continue
                if all_zero_above and level == 0 and value == 0:
                    continue
                total = partial + weight * (value - center) ** 2
                if total > self.radius_sq:
                    continue

                step = 0.0
                if self.cone is not None:
                    step = (value - center) * self.cone.axis[level]
                    if self.cone.misses(level, total, component + step, magnitude + abs(step)):
                        continue

                self.nodes += 1
                if self.nodes > self.budget:
                    msg = f"Enumeration exceeded the budget of {self.budget} nodes."
                    raise EnumerationBudgetExceeded(msg)

                self.z[level] = value
                if level == 0:
                    z = tuple(self.z)
                    if self.accept is None or self.accept(z):
                        self.found.append((total, z))
                        if self.shrink:
                            self.radius_sq = min(self.radius_sq, total * (1 + self.slack))
                else:
                    self._visit(
                        level - 1,
                        total,
                        component + step,
                        magnitude + abs(step),
                        all_zero_above=all_zero_above and value == 0,
                    )
                self.z[level] = 0


def _budget(budget: int | None) -> int:
    return gv.config.budgets.enumeration_nodes if budget is None else budget


def lattice_points(
    mu: np.ndarray, bsq: np.ndarray, radius: float, *, span: int = 0, budget: int | None = None
) -> list[tuple[float, tuple[int, ...]]]:
    """All (squared length, coordinates) with length <= radius, one per +- pair."""

    if not math.isfinite(radius) or radius <= 0:
        return []
    search = _Search(mu, bsq, radius * radius, span, _budget(budget), shrink=False)
    search.run()
    return search.found


def shortest_length_sq(
    mu: np.ndarray, bsq: np.ndarray, radius: float, *, span: int = 0, budget: int | None = None
) -> float | None:
    """Squared length of the shortest vector within radius outside the first span rows, if any."""

    if not math.isfinite(radius) or radius <= 0:
        return None
    search = _Search(mu, bsq, radius * radius, span, _budget(budget), shrink=True)
    search.run()
    if not search.found:
        return None
    return min(length for length, _ in search.found)


def shortest_in_cone(  # noqa: PLR0913
    mu: np.ndarray,
    bsq: np.ndarray,
    axis: np.ndarray,
    cone_constant: float,
    radius: float,
    accept: Callable[[tuple[int, ...]], bool],
    *,
    budget: int | None = None,
) -> list[tuple[float, tuple[int, ...]]]:
    """
    Accepted vectors within radius whose length is within float slack of the shortest one,
    searching only subtrees that can reach |v_axis| >= cone_constant |v|. Empty if none.
    """

    if not math.isfinite(radius) or radius <= 0:
        return []
    cone = _Cone(axis, bsq, cone_constant)
    search = _Search(
        mu, bsq, radius * radius, 0, _budget(budget), shrink=True, slack=2 * CONE_SLACK, cone=cone, accept=accept
    )
    search.run()
    if not search.found:
        return []
    shortest = min(length for length, _ in search.found)
    return [(length, z) for length, z in search.found if length <= shortest * (1 + 2 * CONE_SLACK)]
