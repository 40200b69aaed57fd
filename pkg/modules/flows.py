"""
Diagonal flows a_t = e^{tY} on spaces of lattices.

The flow is never materialized: a_t s Z^d is the lattice s Z^d with coordinate log scales
t * Y, so norms stay in the log domain up to max_flow_time. Consecutive grid points reuse
the previous reduction transform.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import TYPE_CHECKING

import mpmath
import numpy as np

from . import global_vars as gv
from .errors import AllInfinite, BadSampleCount, EnumerationBudgetExceeded, PoleOrBeyond
from .flag_exponents import FlagVarietySpec, flow_element
from .lattice_reduction import IntMatrix, working_precision
from .lattices import (
    ChamberPoint,
    LatticeBasis,
    LatticePosition,
    ReducedLattice,
    c_of_lattice,
    c_of_set,
    successive_minima_vectors,
    wedge_lattice,
    wedge_subsets,
)
from .logger import logger
from .parallel import parallel_map
from .root_core import ChamberVector
from .spaces import AmbientSpace, log_r_chi

if TYPE_CHECKING:
    from typing import Self


def dani_matrix(xi: Sequence) -> list[list[mpmath.mpf]]:
    """s_x for x = [1 : xi_1 : ... : xi_{d-1}]: column 0 is (1, xi), the others are e_2..e_d."""

    d = len(xi) + 1
    with mpmath.workdps(working_precision()):
        values = [mpmath.mpf(1), *(mpmath.mpf(x) for x in xi)]
        return [[values[i] if j == 0 else mpmath.mpf(int(i == j)) for j in range(d)] for i in range(d)]


def flow_diag(y: ChamberVector | Sequence[float]) -> tuple[float, ...]:
    if isinstance(y, ChamberVector):
        if not y.rs.is_type_a:
            msg = "Flows act diagonally on lattices only in type A."
            raise ValueError(msg)
        return tuple(float(v) for v in y.diag_coords)
    return tuple(float(v) for v in y)


def _check_grid(t_grid: Sequence[float]) -> tuple[float, ...]:
    grid = tuple(float(t) for t in t_grid)
    if not grid:
        msg = "The time grid is empty."
        raise ValueError(msg)
    if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
        msg = "The time grid must be strictly increasing."
        raise ValueError(msg)
    limit = gv.config.lab.max_flow_time
    if grid[0] < 0 or grid[-1] > limit:
        msg = f"Flow times must lie in [0, {limit:g}]."
        raise ValueError(msg)
    return grid


def _orbit_steps(
    base: LatticeBasis, y_diag: tuple[float, ...], grid: tuple[float, ...], degrees: Sequence[int]
) -> Iterator[tuple[float, LatticeBasis, dict[int, ReducedLattice]]]:
    """(t, a_t L, reductions of a_t L and of the requested wedge powers) along the grid."""

    d = base.dim
    wedges = {k: (wedge_lattice(base, k), wedge_subsets(d, k)) for k in degrees if k >= 2}  # noqa: PLR2004
    transforms: dict[int, IntMatrix] = {}

    for t in grid:
        scales = [t * y for y in y_diag]
        lattice = base.with_scales(scales)
        reductions = {1: lattice.reduce(transforms.get(1))}
        for k, (wedge, subsets) in wedges.items():
            scaled = wedge.with_scales([sum(scales[j] for j in subset) for subset in subsets])
            reductions[k] = scaled.reduce(transforms.get(k))
        transforms = {k: red.transform for k, red in reductions.items()}
        yield t, lattice, reductions


@dataclass(frozen=True)
class TraceRecord:
    t: float
    log_minima: tuple[float, ...]
    log_r_chi: float | None  # None: nothing found within budget, inf: certified empty
    c: ChamberPoint | None
    flags: tuple[int, ...] = ()

    def csv_row(self) -> list[str]:
        if self.log_r_chi is None:
            r = ""
        elif math.isinf(self.log_r_chi):
            r = "inf"
        else:
            r = f"{self.log_r_chi:.12g}"
        c = [f"{v:.12g}" for v in self.c.eval_coords] if self.c is not None else []
        return [
            f"{self.t:.12g}",
            *(f"{v:.12g}" for v in self.log_minima),
            r,
            *c,
            " ".join(str(k) for k in self.flags),
        ]

    def to_dict(self) -> dict:
        if self.log_r_chi is None:
            r: float | str | None = None
        elif math.isinf(self.log_r_chi):
            r = "inf"
        else:
            r = float(f"{self.log_r_chi:.12g}")
        return {
            "t": self.t,
            "log_lambda": [float(f"{v:.12g}") for v in self.log_minima],
            "log_r_chi": r,
            "c": self.c.to_dict()["eval_coords"] if self.c is not None else None,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class OrbitTrace:
    y_diag: tuple[float, ...]
    records: tuple[TraceRecord, ...]
    space: str | None = None

    @property
    def t_grid(self) -> tuple[float, ...]:
        return tuple(r.t for r in self.records)

    @property
    def dim(self) -> int:
        return len(self.y_diag)

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    @property
    def lipschitz_constant(self) -> float:
        return max(abs(y) for y in self.y_diag)

    def lipschitz_holds(self, slack: float = 1e-6) -> bool:
        """|log lambda_i(t) - log lambda_i(t')| <= max|Y| |t - t'| on consecutive samples."""
        bound = self.lipschitz_constant
        for a, b in zip(self.records, self.records[1:], strict=False):
            allowed = bound * (b.t - a.t) + slack
            if any(abs(x - y) > allowed for x, y in zip(a.log_minima, b.log_minima, strict=True)):
                return False
        return True

    def csv_header(self) -> list[str]:
        d = self.dim
        return [
            "t",
            *(f"log_lambda_{i}" for i in range(1, d + 1)),
            "log_r_chi",
            *(f"c_{k}" for k in range(1, d)),
            "flags",
        ]

    def to_csv(self) -> str:
        stream = io.StringIO()
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.csv_header())
        for record in self.records:
            row = record.csv_row()
            if record.c is None:
                row[-1:-1] = [""] * (self.dim - 1)
            writer.writerow(row)
        return stream.getvalue()

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "Y": list(self.y_diag),
            "records": [r.to_dict() for r in self.records],
        }


def flow_orbit(
    s: LatticeBasis | Sequence[Sequence],
    y: ChamberVector | Sequence[float],
    t_grid: Sequence[float],
    space: AmbientSpace | None = None,
    *,
    with_c: bool = True,
) -> OrbitTrace:
    """Successive minima, r_chi on the space's cone and the position c along a_t s Z^d."""

    base = s if isinstance(s, LatticeBasis) else LatticeBasis.from_matrix(s)
    d = base.dim
    y_diag = flow_diag(y)
    if len(y_diag) != d:
        msg = f"Y has {len(y_diag)} diagonal entries, the lattice has rank {d}."
        raise ValueError(msg)
    grid = _check_grid(t_grid)

    degrees = set(range(2, d)) if with_c else set()
    if space is not None:
        degrees |= {k for k, _ in space.representations()}
    threshold = gv.config.lab.flag_threshold

    records = []
    for t, lattice, reductions in _orbit_steps(base, y_diag, grid, sorted(degrees)):
        minima = successive_minima_vectors(lattice, reduced=reductions[1])

        log_r = None
        if space is not None:
            try:
                log_r = log_r_chi(lattice, space, reductions)
            except EnumerationBudgetExceeded as e:
                logger.warning(f"r_chi not found at t={t:g}: {e}")

        c = None
        flags: tuple[int, ...] = ()
        if with_c and d >= 2:  # noqa: PLR2004
            wedges = {k: reductions[k] for k in range(2, d)}
            c = c_of_lattice(lattice, reductions[1], wedges).c
            flags = tuple(k for k, a in enumerate(c.alpha_values, start=1) if a <= -threshold)

        records.append(TraceRecord(t, tuple(m.log_norm for m in minima), log_r, c, flags))

    logger.debug(f"Traced {len(records)} flow times up to t={grid[-1]:g}")
    return OrbitTrace(y_diag, tuple(records), space.name if space is not None else None)


def point_orbit(xi: Sequence, t_grid: Sequence[float], space: AmbientSpace | None = None) -> OrbitTrace:
    """The orbit of Delta_x for x = [1 : xi] in P^{d-1} under the projective flow."""
    space = space or AmbientSpace.projective(len(xi) + 1)
    return flow_orbit(dani_matrix(xi), space.flow_diag(), t_grid, space)


@dataclass(frozen=True)
class GammaEstimate:
    sup: float
    inf: float
    window: tuple[float, float]
    samples: int

    def to_dict(self) -> dict:
        return {
            "gamma_sup": float(f"{self.sup:.12g}"),
            "gamma_inf": float(f"{self.inf:.12g}"),
            "window": list(self.window),
            "samples": self.samples,
        }


def estimate_gamma(trace: OrbitTrace) -> GammaEstimate:
    """sup and inf of -log r_chi(t) / t over the tail window [T/2, T]."""

    end = trace.final.t
    start = end / 2
    tail = [r for r in trace.records if start <= r.t <= end and r.t > 0]
    values = [
        -r.log_r_chi / r.t for r in tail if r.log_r_chi is not None and math.isfinite(r.log_r_chi)
    ]
    if not values:
        missing = sum(1 for r in tail if r.log_r_chi is None)
        msg = f"No finite r_chi on [{start:g}, {end:g}] ({missing} samples ran out of budget)."
        raise AllInfinite(msg)
    return GammaEstimate(max(values), min(values), (start, end), len(values))


def beta_from_gamma(gamma: float, target: FlagVarietySpec | AmbientSpace) -> float:
    """beta = 1 / (-chi(Y) - gamma); +inf at the pole."""

    if isinstance(target, AmbientSpace):
        neg_chi_y: Fraction = target.neg_chi_y()
    else:
        neg_chi_y = -target.pair(flow_element(target))

    gap = float(neg_chi_y) - gamma
    if gap == 0:
        return math.inf
    if gap < 0:
        msg = f"gamma = {gamma:g} lies beyond the pole -chi(Y) = {float(neg_chi_y):g}."
        raise PoleOrBeyond(msg)
    return 1 / gap


@dataclass(frozen=True)
class OrbitLimit:
    limit: ChamberPoint
    trace: OrbitTrace

    def to_dict(self) -> dict:
        return {
            "limit": self.limit.to_dict()["eval_coords"],
            "norm": float(f"{self.limit.norm:.12g}"),
            "trace": self.trace.to_dict(),
        }


def algebraic_orbit_limit(
    s: LatticeBasis | Sequence[Sequence], y: ChamberVector | Sequence[float], end: float, steps: int | None = None
) -> OrbitLimit:
    """c(a_T s) / T, traced over an evenly spaced grid on [0, T]."""

    if end <= 0:
        msg = "The final time must be positive."
        raise ValueError(msg)
    steps = steps or math.ceil(end) + 1
    grid = np.linspace(0.0, end, max(steps, 2)).tolist()
    trace = flow_orbit(s, y, grid)
    return OrbitLimit(trace.final.c.scaled(1 / end), trace)


@dataclass(frozen=True)
class PolynomialCurve:
    """u -> matrix whose entry (i, j) is sum_k entries[i][j][k] u^k, for u in interval."""

    entries: tuple[tuple[tuple[Fraction, ...], ...], ...]
    interval: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self) -> None:
        d = len(self.entries)
        if d == 0 or any(len(row) != d for row in self.entries):
            msg = "A curve needs a square matrix of polynomials."
            raise ValueError(msg)
        lo, hi = self.interval
        if not lo < hi:
            msg = "The parameter interval must have lo < hi."
            raise ValueError(msg)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @classmethod
    def constant(cls, matrix: Sequence[Sequence]) -> Self:
        return cls(tuple(tuple((Fraction(x),) for x in row) for row in matrix))

    @classmethod
    def unipotent(cls, d: int, permutation: Sequence[int] | None = None, *, lower: bool = True) -> Self:
        """
        Unitriangular curve with entries u, u^2, u^3, ... below (or above) the diagonal, rows
        permuted by the one-line permutation (1-based) when given.
        """

        power = 0
        entries = [[(Fraction(int(i == j)),) for j in range(d)] for i in range(d)]
        for i in range(d):
            for j in range(d):
                if (i > j) if lower else (i < j):
                    power += 1
                    entries[i][j] = (*(Fraction(0),) * power, Fraction(1))

        if permutation is not None:
            if sorted(permutation) != list(range(1, d + 1)):
                msg = f"{list(permutation)} is not a permutation of 1..{d}."
                raise ValueError(msg)
            permuted = [list(row) for row in entries]
            for i, image in enumerate(permutation):
                permuted[image - 1] = entries[i]
            entries = permuted

        return cls(tuple(tuple(row) for row in entries))

    def at(self, u: float) -> list[list[mpmath.mpf]]:
        with mpmath.workdps(working_precision()):
            x = mpmath.mpf(u)
            return [[mpmath.polyval(list(reversed(p)), x) for p in row] for row in self.entries]

    def to_dict(self) -> dict:
        return {
            "entries": [[[str(c) for c in p] for p in row] for row in self.entries],
            "interval": list(self.interval),
        }


@dataclass(frozen=True)
class CurveStep:
    t: float
    c_set: ChamberPoint
    deviations: tuple[float, ...]
    exceed: dict[float, float] = field(default_factory=dict)

    @property
    def rate(self) -> ChamberPoint:
        return self.c_set.scaled(1 / self.t)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "c_set": self.c_set.to_dict()["eval_coords"],
            "c_set_over_t": self.rate.to_dict()["eval_coords"],
            "max_deviation": float(f"{max(self.deviations):.12g}"),
            "exceed": {f"{eps:g}": frac for eps, frac in self.exceed.items()},
        }


@dataclass(frozen=True)
class CurveReport:
    curve: PolynomialCurve
    samples: tuple[float, ...]
    steps: tuple[CurveStep, ...]

    def to_dict(self) -> dict:
        return {
            "curve": self.curve.to_dict(),
            "n_samples": len(self.samples),
            "steps": [s.to_dict() for s in self.steps],
        }


def _sample_positions(
    u: float, curve: PolynomialCurve, y_diag: tuple[float, ...], grid: tuple[float, ...]
) -> list[LatticePosition]:
    base = LatticeBasis.from_matrix(curve.at(u))
    d = base.dim
    return [
        c_of_lattice(lattice, reductions[1], {k: reductions[k] for k in range(2, d)})
        for _, lattice, reductions in _orbit_steps(base, y_diag, grid, range(2, d))
    ]


def curve_experiment(  # noqa: PLR0913
    curve: PolynomialCurve,
    y: ChamberVector | Sequence[float],
    t_grid: Sequence[float],
    n_samples: int,
    seed: int | None = None,
    eps_values: Sequence[float] = (0.2,),
    threads: int | None = None,
) -> CurveReport:
    """
    Samples u uniformly on the curve's interval. For each t: c(a_t S) over all samples and the
    fraction of samples with |c(a_t s) - c(a_t S)| / t above each eps.
    """

    if n_samples < 1:
        msg = f"Need at least one sample, got {n_samples}."
        raise BadSampleCount(msg)
    y_diag = flow_diag(y)
    if len(y_diag) != curve.dim:
        msg = f"Y has {len(y_diag)} diagonal entries, the curve lives in rank {curve.dim}."
        raise ValueError(msg)
    grid = _check_grid(t_grid)
    if grid[0] <= 0:
        msg = "Curve experiments need positive flow times."
        raise ValueError(msg)

    rng = np.random.default_rng(gv.config.seed if seed is None else seed)
    samples = tuple(float(u) for u in rng.uniform(*curve.interval, size=n_samples))

    task = partial(_sample_positions, curve=curve, y_diag=y_diag, grid=grid)
    positions = parallel_map(task, samples, threads)
    bases = [LatticeBasis.from_matrix(curve.at(u)) for u in samples]

    steps = []
    for i, t in enumerate(grid):
        scales = [t * v for v in y_diag]
        lattices = [b.with_scales(scales) for b in bases]
        at_t = [p[i] for p in positions]
        c_set = c_of_set(lattices, at_t).c
        deviations = tuple(p.c.distance(c_set) / t for p in at_t)
        exceed = {
            float(eps): sum(1 for dev in deviations if dev > eps) / n_samples for eps in eps_values
        }
        steps.append(CurveStep(t, c_set, deviations, exceed))
        logger.debug(f"t={t:g}: c(a_t S)/t = {steps[-1].rate.eval_coords}")

    return CurveReport(curve, samples, tuple(steps))
