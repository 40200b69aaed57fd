"""
Counting rational points and rational approximations, and the Monte-Carlo volume of
cusp neighbourhoods in SL_2(R)/SL_2(Z).
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import global_vars as gv
from .enums import AmbientKind, PsiParams
from .errors import BadSampleCount, EnumerationBudgetExceeded
from .logger import logger
from .parallel import parallel_map
from .spaces import AmbientSpace

# heights up to this are checked exhaustively by count_solutions
BRUTE_FORCE_HEIGHT = 16
# Monte-Carlo work is split into this many independently seeded chunks
MC_CHUNKS = 16


def _check_cells(cells: float) -> None:
    budget = gv.config.budgets.point_count_cells
    if cells > budget:
        msg = f"Counting would visit {cells:.3g} cells, over the budget of {budget}."
        raise EnumerationBudgetExceeded(msg)


def _box(d: int, radius: int) -> np.ndarray:
    """Every integer vector of [-radius, radius]^d as rows."""
    _check_cells(float(2 * radius + 1) ** d)
    axes = [np.arange(-radius, radius + 1, dtype=np.int64)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def _primitive_mask(points: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(points), axis=1) == 1


def _canonical_rows(points: np.ndarray) -> np.ndarray:
    """Flip each row so that its first nonzero entry is positive."""
    first = np.argmax(points != 0, axis=1)
    signs = np.sign(points[np.arange(len(points)), first])
    return points * signs[:, None]


def _count_projective(d: int, height: float) -> int:
    radius = math.floor(height)
    _check_cells(float(2 * radius + 1) ** d)

    # slice on the first coordinate so only one (d-1)-box is held at a time
    rest = _box(d - 1, radius)
    rest_sq = np.sum(rest * rest, axis=1)
    total = 0
    for first in range(-radius, radius + 1):
        norm_sq = rest_sq + first * first
        mask = (norm_sq <= height * height) & (norm_sq > 0)
        if not mask.any():
            continue
        g = np.gcd.reduce(np.abs(rest[mask]), axis=1)
        total += int(np.count_nonzero(np.gcd(g, abs(first)) == 1))
    return total // 2


def _ball(d: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer vectors of norm <= radius sorted by squared norm, with their squared norms."""
    points = _box(d, math.floor(radius))
    norm_sq = np.sum(points * points, axis=1)
    keep = norm_sq <= radius * radius
    points, norm_sq = points[keep], norm_sq[keep]
    order = np.argsort(norm_sq, kind="stable")
    return points[order], norm_sq[order]


def _pluecker_pairs(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    d = u.shape[-1]
    return np.stack(
        [u[..., i] * v[..., j] - u[..., j] * v[..., i] for i in range(d) for j in range(i + 1, d)],
        axis=-1,
    )


def _count_grassmann_planes(d: int, height: float) -> int:
    """
    Primitive rank-2 sublattices of Z^d with covolume <= height, through their Lagrange-reduced
    bases (u, v): |u|^2 <= 2T/sqrt(3) and |v| <= 2T / (sqrt(3) |u|).
    """

    slack = 1 + 1e-9
    ball, ball_sq = _ball(d, 2 * height / math.sqrt(3) * slack)
    if len(ball) == 0:
        return 0

    u_limit = 2 * height / math.sqrt(3) * slack
    candidates = ball[(ball_sq <= u_limit) & (ball_sq > 0)]
    candidates = candidates[_primitive_mask(candidates)]
    candidates = np.unique(_canonical_rows(candidates), axis=0)

    found = []
    for u in candidates:
        u_sq = int(u @ u)
        v_radius_sq = (2 * height / math.sqrt(3)) ** 2 / u_sq * slack
        stop = int(np.searchsorted(ball_sq, v_radius_sq, side="right"))
        start = int(np.searchsorted(ball_sq, u_sq, side="left"))
        v = ball[start:stop]
        if len(v) == 0:
            continue
        v = v[2 * np.abs(v @ u) <= u_sq]
        p = _pluecker_pairs(u, v)
        p = p[np.sum(p * p, axis=1) <= height * height]
        p = p[np.any(p != 0, axis=1)]
        p = p[_primitive_mask(p)]
        if len(p):
            found.append(_canonical_rows(p))

    if not found:
        return 0
    return len(np.unique(np.concatenate(found), axis=0))


def count_rational_points(space: AmbientSpace, height: float) -> int:
    """Rational points of height <= T on P^{d-1} or Grass(l, d) with min(l, d - l) <= 2."""

    if height < 1:
        return 0

    match space.kind:
        case AmbientKind.PROJECTIVE:
            count = _count_projective(space.d, height)
        case AmbientKind.GRASSMANN:
            # Grass(l, d) and Grass(d - l, d) share their Pluecker heights
            ell = min(space.ell, space.d - space.ell)
            if ell == 1:
                count = _count_projective(space.d, height)
            elif ell == 2:  # noqa: PLR2004
                count = _count_grassmann_planes(space.d, height)
            else:
                msg = f"Counting on {space.name} is not supported (needs min(l, d - l) <= 2)."
                raise ValueError(msg)
        case _:
            msg = f"Counting rational points is not supported on {space.name}."
            raise ValueError(msg)

    logger.debug(f"N({height:g}) = {count} on {space.name}")
    return count


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    x = np.log(np.asarray(xs, dtype=np.float64))
    y = np.log(np.asarray(ys, dtype=np.float64))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass(frozen=True)
class GrowthReport:
    heights: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float

    def to_dict(self) -> dict:
        return {
            "T": list(self.heights),
            "counts": list(self.counts),
            "slope": float(f"{self.slope:.12g}"),
        }


def count_growth(space: AmbientSpace, heights: Sequence[float]) -> GrowthReport:
    counts = tuple(count_rational_points(space, t) for t in heights)
    slope = fit_loglog_slope(heights, counts) if len(heights) > 1 else math.nan
    return GrowthReport(tuple(float(t) for t in heights), counts, slope)


def psi_value(psi: PsiParams, u: np.ndarray | float) -> np.ndarray:
    """psi(u) = c * max(log u, 1)^-gamma * max(log max(log u, 1), 1)^-delta."""
    log_u = np.maximum(np.log(u), 1.0)
    log_log_u = np.maximum(np.log(log_u), 1.0)
    return float(psi.c) * log_u ** (-float(psi.gamma)) * log_log_u ** (-float(psi.delta))


def _chordal_distance(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|x ^ v| / (|x| |v|) through the 2x2 minors."""
    wedge = _pluecker_pairs(np.broadcast_to(x, v.shape).astype(np.float64), v.astype(np.float64))
    return np.sqrt(np.sum(wedge * wedge, axis=-1)) / (np.linalg.norm(x) * np.linalg.norm(v, axis=-1))


def _solutions_mask(x: np.ndarray, v: np.ndarray, psi: PsiParams, beta: float) -> np.ndarray:
    heights = np.linalg.norm(v.astype(np.float64), axis=-1)
    return _chordal_distance(x, v) <= heights ** (-beta) * psi_value(psi, heights)


def count_solutions(
    x: Sequence[float], psi: PsiParams, height: float, space: AmbientSpace | None = None
) -> int:
    """
    Primitive v (up to sign) with H(v) <= T and d(x, v) <= H(v)^-beta psi(H(v)), where beta is
    the almost-sure exponent d / (d - 1) of P^{d-1} and d is the chordal distance.
    """

    point = np.asarray([float(v) for v in x], dtype=np.float64)
    d = len(point)
    space = space or AmbientSpace.projective(d)
    if space.kind != AmbientKind.PROJECTIVE or space.d != d:
        msg = "Solution counting is only defined on projective spaces."
        raise ValueError(msg)
    if not np.any(point):
        msg = "x cannot be the zero vector."
        raise ValueError(msg)
    c, gamma, delta = (float(v) for v in psi)
    if c < 0 or gamma < 0 or delta < 0:
        msg = "Solution counting needs c, gamma, delta >= 0."
        raise ValueError(msg)
    if c == 0 or height < 1:
        return 0

    beta = d / (d - 1)
    pivot = int(np.argmax(np.abs(point)))
    spread = float(np.linalg.norm(point) / abs(point[pivot]))

    # beyond this height every solution has a nonzero pivot coordinate
    cutoff = max(BRUTE_FORCE_HEIGHT, math.ceil((c * spread) ** (1 / beta)) + 1)
    cutoff = min(cutoff, math.floor(height))

    small = _box(d, cutoff)
    small = small[np.sum(small * small, axis=1) <= cutoff * cutoff]
    small = small[np.any(small != 0, axis=1)]
    small = small[_primitive_mask(small)]
    total = int(np.count_nonzero(_solutions_mask(point, small, psi, beta))) // 2

    top = math.floor(height)
    if top <= cutoff:
        return total

    # |v - (v_m / x_m) x| <= 2 spread |v| d(x, v) <= 2 spread c cutoff^(1 - beta)
    offset = math.ceil(2 * spread * c * cutoff ** (1 - beta)) + 1
    width = 2 * offset + 1
    _check_cells(float(top) * width ** (d - 1))

    q = np.arange(1, top + 1, dtype=np.int64)
    others = [j for j in range(d) if j != pivot]
    centers = [np.rint(q * (point[j] / point[pivot])).astype(np.int64) for j in others]
    shifts = np.stack(
        np.meshgrid(*[np.arange(-offset, offset + 1, dtype=np.int64)] * len(others), indexing="ij"),
        axis=-1,
    ).reshape(-1, len(others))

    for shift in shifts:
        v = np.empty((len(q), d), dtype=np.int64)
        v[:, pivot] = q
        for column, j in enumerate(others):
            v[:, j] = centers[column] + shift[column]
        norm_sq = np.sum(v * v, axis=1)
        v = v[(norm_sq > cutoff * cutoff) & (norm_sq <= height * height)]
        v = v[_primitive_mask(v)]
        total += int(np.count_nonzero(_solutions_mask(point, v, psi, beta)))

    return total


@dataclass(frozen=True)
class DirectBeta:
    beta: float
    records: int

    def to_dict(self) -> dict:
        return {"beta": float(f"{self.beta:.12g}"), "records": self.records}


def estimate_beta_direct(xi: float, height: int, min_height: float = 10.0) -> DirectBeta:
    """
    Exponent of the best approximations of x = [1 : xi] in P^1: the slope of log d against
    log H over the record-breaking p/q with p = round(q xi), q <= T.
    """

    q = np.arange(1, int(height) + 1, dtype=np.int64)
    p = np.rint(q * xi).astype(np.int64)
    v = np.stack([q, p], axis=1)
    dist = _chordal_distance(np.array([1.0, xi]), v)
    heights = np.linalg.norm(v.astype(np.float64), axis=1)

    running = np.minimum.accumulate(dist)
    is_record = np.concatenate([[True], dist[1:] < running[:-1]]) & (dist > 0)
    keep = is_record & (heights >= min_height)
    if np.count_nonzero(keep) < 2:  # noqa: PLR2004
        msg = "Not enough record approximations to fit an exponent."
        raise ValueError(msg)

    slope = fit_loglog_slope(heights[keep], dist[keep])
    return DirectBeta(-slope, int(np.count_nonzero(keep)))


def _cusp_chunk(item: tuple[np.random.SeedSequence, int], r_values: tuple[float, ...]) -> np.ndarray:
    seed, size = item
    rng = np.random.default_rng(seed)
    # x = sin(theta) gives x the density 1/sqrt(1 - x^2) of dx dy / y^2 over the domain
    x = np.sin(rng.uniform(-math.pi / 6, math.pi / 6, size))
    y = np.sqrt(1 - x * x) / (1 - rng.random(size))
    shortest = 1 / np.sqrt(y)
    return np.array([np.count_nonzero(shortest <= r) for r in r_values], dtype=np.int64)


def monte_carlo_cusp_fraction(
    r_values: Sequence[float], n_samples: int, seed: int | None = None, threads: int | None = None
) -> tuple[float, ...]:
    """
    Fraction of unimodular lattices in R^2 with lambda_1 <= r, sampling z = x + iy uniformly for
    dx dy / y^2 on the fundamental domain |x| <= 1/2, |z| >= 1. lambda_1 does not depend on
    the rotation angle of the fiber, so only z is drawn.
    """

    if n_samples < 1:
        msg = f"Need at least one sample, got {n_samples}."
        raise BadSampleCount(msg)

    seed = gv.config.seed if seed is None else seed
    children = np.random.SeedSequence(seed).spawn(MC_CHUNKS)
    sizes = [len(part) for part in np.array_split(np.arange(n_samples), MC_CHUNKS)]
    task = partial(_cusp_chunk, r_values=tuple(float(r) for r in r_values))
    hits = parallel_map(task, list(zip(children, sizes, strict=True)), threads)
    total = np.sum(hits, axis=0)
    return tuple(float(h) / n_samples for h in total)


def cusp_fraction_exact(r: float) -> float:
    """The limit of monte_carlo_cusp_fraction: 3 r^2 / pi for r <= 1, 1 from r = 2/sqrt(3)."""
    if r <= 1:
        return 3 * r * r / math.pi
    y0 = 1 / (r * r)
    x0 = min(math.sqrt(1 - y0 * y0), 0.5)
    measure = 2 * math.asin(x0) + (1 - 2 * x0) / y0
    return min(1.0, measure * 3 / math.pi)
