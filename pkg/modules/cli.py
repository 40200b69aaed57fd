"""
Batch command line: every computation as a `group command --flag value` call.

Exact values are printed as "p/q" strings, floating point values with 12 significant digits.
Exit codes: 0 on success, 2 on usage or domain errors, 3 when a budget runs out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, TextIO, TypeVar

import mpmath

from . import exact_linalg as la
from . import global_vars as gv
from .counting import (
    count_growth,
    count_rational_points,
    count_solutions,
    cusp_fraction_exact,
    fit_loglog_slope,
    monte_carlo_cusp_fraction,
)
from .enums import Family, OutputFormat, PsiParams
from .errors import BudgetError, FlagExpError, UsageError
from .expressions import (
    parse_fraction_list,
    parse_grid,
    parse_int_list,
    parse_matrix,
    parse_real_list,
)
from .flag_exponents import (
    FlagVarietySpec,
    anticanonical_weight,
    beta_almost_sure,
    cc_dimension,
    counting_bound,
    counting_exponents,
    flow_element,
    format_exponent,
    khintchine_classify,
    khintchine_profile,
    level_dimensions,
    quadric_khintchine_profile,
    quadric_profile,
)
from .flows import (
    PolynomialCurve,
    beta_from_gamma,
    curve_experiment,
    dani_matrix,
    estimate_gamma,
    flow_orbit,
)
from .lattices import LatticeBasis, minkowski_check, successive_minima_vectors
from .logger import logger
from .root_core import build_root_system, weyl_act, weyl_element
from .schubert_cells import (
    GrassFlagData,
    analyze_cell,
    coset_reps,
    grassmannian_beta,
    grassmannian_coset,
    grassmannian_gamma,
    is_coset_rep,
    min_beta,
    spectrum_report,
)
from .space_spec import (
    FlagSpec,
    GrassmannianSpec,
    QuadricSpec,
    SpaceSpec,
    spacespec_format,
    spacespec_parse,
)
from .spaces import AmbientSpace

if TYPE_CHECKING:
    from typing import Self

T = TypeVar("T")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3

DEFAULT_MC_RADII = "0.1,0.2,0.3,0.4,0.5"
DEFAULT_CURVE_GRID = "10,20,30,40"

# flag -> (metavar, grammar shown in help and in usage errors)
FLAGS: dict[str, tuple[str, str]] = {
    "space": ("SPEC", "projective:d | grassmannian:l,d | flag:<A-D><rank>:theta=i,..:chi=n1,.. | quadric:n[,x0]"),
    "family": ("F", "root system family A, B, C or D"),
    "rank": ("R", "positive integer rank"),
    "theta": ("I,..", "1-based simple roots of the Levi, comma separated (may be empty)"),
    "chi": ("N,..", "weight coefficients over the fundamental weights, one per simple root"),
    "psi": ("C,G,D", "psi(u) = c (log u)^-gamma (log log u)^-delta as three rationals c,gamma,delta"),
    "T": ("T", "final flow time or height bound"),
    "grid": ("GRID", "comma separated values or start:stop:count"),
    "steps": ("N", "number of grid points between 0 and T"),
    "samples": ("N", "positive sample count"),
    "seed": ("SEED", "64-bit integer seed"),
    "threads": ("N", "worker process cap, at least 1"),
    "budget": ("N", "node and cell budget for enumerations and point counts"),
    "word": ("I,..", "1-based reduced word of simple reflections (may be empty)"),
    "data": ("DK,IK;..", "flag data as dim,intersection pairs separated by ';', ending with d,l"),
    "matrix": ("ROWS", "square matrix, rows separated by ';', entries by ','"),
    "point": ("XI,..", "affine coordinates of x = [1 : xi_1 : ...], real expressions such as (1+sqrt(5))/2"),
    "curve": ("KIND", "lower | upper | cell:<one-line permutation>"),
    "eps": ("E,..", "deviation thresholds, comma separated"),
}


@dataclass
class Output:
    payload: dict
    rows: list[dict] | None = None
    csv_text: str | None = None


@dataclass(frozen=True)
class CommandRequest:
    group: str
    command: str
    options: tuple[tuple[str, str], ...] = ()  # (flag, raw value), sorted by flag
    output_format: OutputFormat = OutputFormat.JSON

    @property
    def subcommand(self) -> str:
        return f"{self.group} {self.command}"

    def option(self, name: str) -> str | None:
        return dict(self.options).get(name)

    def to_argv(self) -> list[str]:
        argv = [self.group, self.command]
        argv.extend(f"--{name}={value}" for name, value in self.options)
        argv.append(f"--format={self.output_format.value}")
        return argv

    @classmethod
    def parse(cls, argv: Sequence[str]) -> Self:
        """Raises SystemExit(2) on usage errors, like argparse."""

        namespace = build_parser().parse_args(list(argv))
        reserved = {"group", "command", "format"}
        options = tuple(
            sorted(
                (name, value)
                for name, value in vars(namespace).items()
                if name not in reserved and value is not None
            )
        )
        command = COMMANDS[(namespace.group, namespace.command)]
        fmt = OutputFormat.from_str(namespace.format or command.default_format.value)
        return cls(namespace.group, namespace.command, options, fmt)


@dataclass(frozen=True)
class Command:
    handler: Callable[[CommandRequest], Output]
    flags: tuple[str, ...]
    description: str
    default_format: OutputFormat = OutputFormat.JSON


# ---------------------------------------------------------------- option parsing


def _parsed(
    request: CommandRequest, name: str, parse: Callable[[str], T], default: T | None = None
) -> T | None:
    raw = request.option(name)
    if raw is None:
        return default
    try:
        return parse(raw)
    except (ValueError, ArithmeticError) as e:
        msg = f"--{name} {raw!r}: {e} Expected {FLAGS[name][1]}."
        raise UsageError(msg) from e


def _required(request: CommandRequest, name: str, parse: Callable[[str], T]) -> T:
    value = _parsed(request, name, parse)
    if value is None:
        msg = f"{request.subcommand} needs --{name} ({FLAGS[name][1]})."
        raise UsageError(msg)
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        msg = f"{value} is not positive."
        raise ValueError(msg)
    return value


def _psi(text: str) -> PsiParams:
    values = parse_fraction_list(text)
    if len(values) != 3:  # noqa: PLR2004
        msg = f"Expected three values, got {len(values)}."
        raise ValueError(msg)
    return PsiParams(*values)


def _space_spec(request: CommandRequest) -> SpaceSpec:
    spec = _parsed(request, "space", spacespec_parse)
    if spec is not None:
        return spec

    family = _parsed(request, "family", Family.from_str)
    if family is None:
        msg = f"{request.subcommand} needs --space or --family with --rank ({FLAGS['space'][1]})."
        raise UsageError(msg)
    rank = _required(request, "rank", _positive_int)
    theta = tuple(sorted(_parsed(request, "theta", parse_int_list, []) or []))
    chi = _parsed(request, "chi", parse_int_list)
    if chi is None:
        rs = build_root_system(family, rank)
        chi = list(anticanonical_weight(rs, frozenset(i - 1 for i in theta)))
    return FlagSpec(family, rank, theta, tuple(chi))


def _flag_variety(spec: SpaceSpec) -> FlagVarietySpec:
    if isinstance(spec, QuadricSpec) and spec.n < 3:  # noqa: PLR2004
        msg = f"{spacespec_format(spec)} has no split root data, use n >= 3."
        raise UsageError(msg)
    return spec.flag_variety()


def _ambient(request: CommandRequest, dim: int | None = None) -> AmbientSpace:
    spec = _parsed(request, "space", spacespec_parse)
    if spec is None:
        if dim is None:
            msg = f"{request.subcommand} needs --space ({FLAGS['space'][1]})."
            raise UsageError(msg)
        return AmbientSpace.projective(dim)
    space = AmbientSpace.from_spec(spec)
    if dim is not None and space.d != dim:
        msg = f"{space.name} lives in dimension {space.d}, the lattice has rank {dim}."
        raise UsageError(msg)
    return space


def _time_grid(request: CommandRequest) -> list[float]:
    grid = _parsed(request, "grid", parse_grid)
    if grid is not None:
        return grid
    end = _required(request, "T", lambda text: float(parse_real_list(text)[0]))
    steps = _parsed(request, "steps", _positive_int, math.ceil(end) + 1)
    return parse_grid(f"0:{end!r}:{max(steps, 2)}")


def _start_lattice(request: CommandRequest) -> tuple[LatticeBasis, AmbientSpace]:
    point = _parsed(request, "point", parse_real_list)
    if point is not None:
        space = _ambient(request, len(point) + 1)
        return LatticeBasis.from_matrix(dani_matrix(point)), space
    matrix = _required(request, "matrix", parse_matrix)
    lattice = LatticeBasis.from_matrix(matrix)
    return lattice, _ambient(request, lattice.dim)


def _real(value: float | mpmath.mpf) -> float | str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(f"{value:.12g}")


# ---------------------------------------------------------------- handlers


def rootsys_info(request: CommandRequest) -> Output:
    family = _required(request, "family", Family.from_str)
    rank = _required(request, "rank", _positive_int)
    rs = build_root_system(family, rank)

    payload = rs.to_dict()
    payload["weyl_group_order"] = rs.weyl_group_order()
    payload["positive_root_count"] = len(rs.positive_roots)
    rows = [
        {"index": i, "coefficients": list(root.coefficients), "height": root.height}
        for i, root in enumerate(rs.positive_roots, start=1)
    ]
    return Output(payload, rows)


def flag_exponent(request: CommandRequest) -> Output:
    spec = _space_spec(request)
    if isinstance(spec, QuadricSpec) and spec.n < 3:  # noqa: PLR2004
        profile = quadric_profile(spec.n, spec.is_x0)
        return Output({"space": spacespec_format(spec), "beta_X": la.format_fraction(profile.beta)})

    fv = _flag_variety(spec)
    payload = {
        "space": spacespec_format(spec),
        **fv.to_dict(),
        "beta_X": format_exponent(beta_almost_sure(fv)),
        "cc_dimension": cc_dimension(fv.rs, fv.theta),
        "levels": {str(lvl): n for lvl, n in level_dimensions(fv.rs, fv.theta).items()},
        "counting_bound": la.format_fraction(counting_bound(fv)),
        "Y": flow_element(fv).to_dict()["eval_coords"],
    }
    return Output(payload)


def flag_khintchine(request: CommandRequest) -> Output:
    spec = _space_spec(request)
    if isinstance(spec, QuadricSpec):
        profile = quadric_khintchine_profile(spec.n, spec.is_x0)
    else:
        profile = khintchine_profile(_flag_variety(spec))

    payload = {
        "space": spacespec_format(spec),
        "a": la.format_fraction(profile.a_chi),
        "b": profile.b_chi,
        "beta_X": la.format_fraction(profile.beta_X),
        "power": la.format_fraction(profile.a_chi / profile.beta_X),
    }
    psi = _parsed(request, "psi", _psi)
    if psi is not None:
        payload["psi"] = [la.format_fraction(x) for x in psi]
        payload["verdict"] = khintchine_classify(profile, psi).value
    return Output(payload)


def flag_counting(request: CommandRequest) -> Output:
    spec = _space_spec(request)
    fv = _flag_variety(spec)
    u, v = counting_exponents(fv)
    payload = {
        "space": spacespec_format(spec),
        "u": la.format_fraction(u),
        "v": v,
        "cc_dimension": cc_dimension(fv.rs, fv.theta),
        "counting_bound": la.format_fraction(counting_bound(fv)),
        "beta_X": la.format_fraction(beta_almost_sure(fv)),
    }
    return Output(payload)


def _cell_row(analysis: dict) -> dict:
    return {key: analysis[key] for key in ("w_word", "gamma", "beta", "unstable")}


def schubert_spectrum(request: CommandRequest) -> Output:
    spec = _space_spec(request)
    fv = _flag_variety(spec)
    cells = [c.to_dict() for c in spectrum_report(fv)]
    payload = {
        "space": spacespec_format(spec),
        "beta_X": format_exponent(beta_almost_sure(fv)),
        "min_beta": format_exponent(min_beta(fv)) if len(cells) > 1 else None,
        "cells": cells,
    }
    return Output(payload, [_cell_row(c) for c in cells])


def schubert_analyze(request: CommandRequest) -> Output:
    spec = _space_spec(request)
    fv = _flag_variety(spec)
    word = _required(request, "word", parse_int_list)
    w = weyl_element(fv.rs, [i - 1 for i in word])

    if not is_coset_rep(fv, w):
        y = flow_element(fv)
        yw = weyl_act(w, y)
        w = next(r for r in coset_reps(fv) if weyl_act(r, y) == yw)
        logger.info(f"Word {word} is not a minimal coset representative, using {w.word_text()}")

    analysis = analyze_cell(fv, w)
    payload = {
        "space": spacespec_format(spec),
        "beta_X": format_exponent(beta_almost_sure(fv)),
        **analysis.to_dict(),
    }
    return Output(payload)


def _flag_data(text: str) -> list[list[int]]:
    steps = [parse_int_list(part) for part in text.split(";") if part.strip()]
    if any(len(step) != 2 for step in steps):  # noqa: PLR2004
        msg = "Every step is a pair dim,intersection."
        raise ValueError(msg)
    return steps


def schubert_grassmann_gamma(request: CommandRequest) -> Output:
    spec = _space_spec(request)
    if not isinstance(spec, GrassmannianSpec):
        msg = f"schubert grassmann-gamma needs --space grassmannian:l,d, got {spacespec_format(spec)}."
        raise UsageError(msg)

    data = GrassFlagData.create(spec.d, spec.ell, _required(request, "data", _flag_data))
    gamma = grassmannian_gamma(data)
    coset = grassmannian_coset(data)
    cell = analyze_cell(FlagVarietySpec.grassmannian(spec.ell, spec.d), coset)

    payload = {
        "space": spacespec_format(spec),
        "data": data.to_dict(),
        "canonical": data.canonical().to_dict(),
        "gamma": la.format_fraction(gamma),
        "beta": format_exponent(grassmannian_beta(data)),
        "cell": coset.to_dict(),
        "cell_gamma": la.format_fraction(cell.gamma),
    }
    return Output(payload)


def lattice_minima(request: CommandRequest) -> Output:
    lattice = LatticeBasis.from_matrix(_required(request, "matrix", parse_matrix))
    minima = successive_minima_vectors(lattice)
    report = minkowski_check(lattice, minima)
    payload = {
        "dim": lattice.dim,
        "provenance": lattice.provenance.value,
        "log_covolume": _real(lattice.log_covolume()),
        "minima": [_real(m.norm) for m in minima],
        "vectors": [list(m.coords) for m in minima],
        "minkowski": {
            "holds": report.holds,
            "ratio": _real(report.ratio),
            "lower": _real(report.lower),
            "upper": _real(report.upper),
        },
    }
    rows = [
        {"i": i, "lambda": _real(m.norm), "vector": list(m.coords)}
        for i, m in enumerate(minima, start=1)
    ]
    return Output(payload, rows)


def lattice_orbit(request: CommandRequest) -> Output:
    lattice, space = _start_lattice(request)
    trace = flow_orbit(lattice, space.flow_diag(), _time_grid(request), space)
    payload = trace.to_dict()
    payload["lipschitz_holds"] = trace.lipschitz_holds()
    rows = [dict(zip(trace.csv_header(), row, strict=True)) for row in _csv_rows(trace.to_csv())[1:]]
    return Output(payload, rows, trace.to_csv())


def _csv_rows(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


def lattice_estimate_gamma(request: CommandRequest) -> Output:
    lattice, space = _start_lattice(request)
    trace = flow_orbit(lattice, space.flow_diag(), _time_grid(request), space, with_c=False)
    estimate = estimate_gamma(trace)
    payload = {
        "space": space.name,
        "T": trace.final.t,
        **estimate.to_dict(),
        "neg_chi_Y": la.format_fraction(space.neg_chi_y()),
        "beta_sup": _real(beta_from_gamma(estimate.sup, space)),
        "beta_inf": _real(beta_from_gamma(estimate.inf, space)),
    }
    return Output(payload)


def lattice_count_points(request: CommandRequest) -> Output:
    space = _ambient(request)
    heights = _parsed(request, "grid", parse_grid)
    if heights is None:
        heights = [_required(request, "T", lambda text: float(parse_real_list(text)[0]))]

    payload: dict = {"space": space.name}
    if len(heights) == 1:
        payload |= {"T": heights[0], "count": count_rational_points(space, heights[0])}
        return Output(payload)

    report = count_growth(space, heights)
    payload |= report.to_dict()
    rows = [{"T": t, "count": n} for t, n in zip(report.heights, report.counts, strict=True)]
    return Output(payload, rows)


def lattice_count_solutions(request: CommandRequest) -> Output:
    xi = _required(request, "point", parse_real_list)
    psi = _required(request, "psi", _psi)
    heights = _parsed(request, "grid", parse_grid)
    if heights is None:
        heights = [_required(request, "T", lambda text: float(parse_real_list(text)[0]))]

    x = [1.0, *(float(v) for v in xi)]
    space = _ambient(request, len(x))
    counts = [count_solutions(x, psi, t, space) for t in heights]
    payload = {
        "space": space.name,
        "point": [_real(v) for v in x],
        "psi": [la.format_fraction(v) for v in psi],
        "T": heights,
        "counts": counts,
    }
    rows = [{"T": t, "count": n} for t, n in zip(heights, counts, strict=True)]
    return Output(payload, rows)


def lattice_mc_volume(request: CommandRequest) -> Output:
    radii = _parsed(request, "grid", parse_grid) or parse_grid(DEFAULT_MC_RADII)
    samples = _required(request, "samples", _positive_int)
    seed = _parsed(request, "seed", int, gv.config.seed)
    threads = _parsed(request, "threads", _positive_int)

    fractions = monte_carlo_cusp_fraction(radii, samples, seed, threads)
    exact = [cusp_fraction_exact(r) for r in radii]
    hit = [(r, f) for r, f in zip(radii, fractions, strict=True) if f > 0]
    slope = fit_loglog_slope(*zip(*hit, strict=True)) if len(hit) > 1 else math.nan

    payload = {
        "samples": samples,
        "seed": seed,
        "r": radii,
        "fraction": [_real(f) for f in fractions],
        "exact": [_real(f) for f in exact],
        "slope": _real(slope),
    }
    rows = [
        {"r": r, "fraction": _real(f), "exact": _real(e)}
        for r, f, e in zip(radii, fractions, exact, strict=True)
    ]
    return Output(payload, rows)


def _curve(text: str, d: int) -> PolynomialCurve:
    kind, _, rest = text.partition(":")
    match kind.strip().lower():
        case "lower":
            return PolynomialCurve.unipotent(d)
        case "upper":
            return PolynomialCurve.unipotent(d, lower=False)
        case "cell":
            return PolynomialCurve.unipotent(d, parse_int_list(rest), lower=False)
    msg = f"Unknown curve kind {kind!r}."
    raise ValueError(msg)


def lattice_curve_experiment(request: CommandRequest) -> Output:
    d = _parsed(request, "rank", _positive_int, 2) + 1
    curve = _parsed(request, "curve", lambda text: _curve(text, d)) or PolynomialCurve.unipotent(d)
    samples = _required(request, "samples", _positive_int)
    grid = _parsed(request, "grid", parse_grid) or parse_grid(DEFAULT_CURVE_GRID)
    eps = _parsed(request, "eps", lambda text: [float(v) for v in parse_real_list(text)]) or [0.2]
    seed = _parsed(request, "seed", int, gv.config.seed)
    threads = _parsed(request, "threads", _positive_int)

    y = AmbientSpace.fullflag((1,) * (d - 1)).flow_diag()
    report = curve_experiment(curve, y, grid, samples, seed, eps, threads)
    payload = {"seed": seed, "Y": list(y), **report.to_dict()}
    rows = []
    for step in report.steps:
        row = {"t": step.t, "c_set_over_t": [_real(v) for v in step.rate.eval_coords]}
        row |= {f"exceed_{threshold:g}": frac for threshold, frac in step.exceed.items()}
        rows.append(row)
    return Output(payload, rows)


COMMON_FLAGS = ("budget",)
SPACE_FLAGS = ("space", "family", "rank", "theta", "chi")

COMMANDS: dict[tuple[str, str], Command] = {
    ("rootsys", "info"): Command(
        rootsys_info, ("family", "rank"), "Root data of a split family.", OutputFormat.TABLE
    ),
    ("flag", "exponent"): Command(flag_exponent, SPACE_FLAGS, "Almost-sure exponent and flow element."),
    ("flag", "khintchine"): Command(
        flag_khintchine, (*SPACE_FLAGS, "psi"), "Khintchine constants and the psi verdict."
    ),
    ("flag", "counting"): Command(flag_counting, SPACE_FLAGS, "Rational point counting exponents."),
    ("schubert", "spectrum"): Command(schubert_spectrum, SPACE_FLAGS, "Exponents of every Schubert cell."),
    ("schubert", "analyze"): Command(
        schubert_analyze, (*SPACE_FLAGS, "word"), "Stability and exponent of one cell."
    ),
    ("schubert", "grassmann-gamma"): Command(
        schubert_grassmann_gamma, ("space", "data"), "Exponent of a Grassmannian point from flag data."
    ),
    ("lattice", "minima"): Command(lattice_minima, ("matrix",), "Successive minima and Minkowski bounds."),
    ("lattice", "orbit"): Command(
        lattice_orbit, ("space", "point", "matrix", "T", "steps", "grid"), "Trace of a diagonal orbit."
    ),
    ("lattice", "estimate-gamma"): Command(
        lattice_estimate_gamma,
        ("space", "point", "matrix", "T", "steps", "grid"),
        "Escape rate and exponent from an orbit.",
    ),
    ("lattice", "count-points"): Command(
        lattice_count_points, ("space", "T", "grid"), "Rational points of bounded height."
    ),
    ("lattice", "count-solutions"): Command(
        lattice_count_solutions, ("space", "point", "psi", "T", "grid"), "Approximations within psi."
    ),
    ("lattice", "mc-volume"): Command(
        lattice_mc_volume, ("samples", "seed", "threads", "grid"), "Monte-Carlo cusp volume in SL2."
    ),
    ("lattice", "curve-experiment"): Command(
        lattice_curve_experiment,
        ("rank", "curve", "samples", "seed", "threads", "grid", "eps"),
        "Non-divergence along a polynomial curve in SL_d.",
    ),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagexp", description="Diophantine exponents on flag varieties."
    )
    groups = parser.add_subparsers(dest="group", required=True, metavar="GROUP")
    group_parsers: dict[str, argparse._SubParsersAction] = {}

    for (group, name), command in COMMANDS.items():
        if group not in group_parsers:
            group_parser = groups.add_parser(group, help=f"{group} commands")
            group_parsers[group] = group_parser.add_subparsers(
                dest="command", required=True, metavar="COMMAND"
            )

        sub = group_parsers[group].add_parser(
            name, help=command.description, description=command.description
        )
        for flag in (*command.flags, *COMMON_FLAGS):
            metavar, grammar = FLAGS[flag]
            sub.add_argument(f"--{flag}", dest=flag, metavar=metavar, help=grammar)
        sub.add_argument(
            "--format",
            choices=[f.value for f in OutputFormat],
            help=f"output format (default {command.default_format.value})",
        )

    return parser


# ---------------------------------------------------------------- rendering


def _cell(value: object) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, separators=(",", ":"))


def _flat_rows(payload: dict) -> list[dict]:
    return [{"key": key, "value": value} for key, value in payload.items()]


def render(output: Output, fmt: OutputFormat) -> str:
    match fmt:
        case OutputFormat.JSON:
            return json.dumps(output.payload, indent=4) + "\n"
        case OutputFormat.CSV:
            if output.csv_text is not None:
                return output.csv_text
            rows = output.rows if output.rows is not None else _flat_rows(output.payload)
            stream = io.StringIO()
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(list(rows[0]) if rows else [])
            writer.writerows([_cell(v) for v in row.values()] for row in rows)
            return stream.getvalue()
        case OutputFormat.TABLE:
            rows = output.rows if output.rows is not None else _flat_rows(output.payload)
            if not rows:
                return ""
            header = list(rows[0])
            cells = [[_cell(row[key]) for key in header] for row in rows]
            widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
            lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths, strict=True)).rstrip()]
            lines.append("  ".join("-" * w for w in widths))
            lines.extend(
                "  ".join(c.ljust(w) for c, w in zip(row, widths, strict=True)).rstrip() for row in cells
            )
            return "\n".join(lines) + "\n"


@contextmanager
def _budget_override(raw: str | None) -> Iterator[None]:
    if raw is None:
        yield
        return
    try:
        nodes = _positive_int(raw)
    except ValueError as e:
        msg = f"--budget {raw!r}: {e} Expected {FLAGS['budget'][1]}."
        raise UsageError(msg) from e

    previous = gv.config
    budgets = replace(previous.budgets, enumeration_nodes=nodes, point_count_cells=nodes)
    gv.config = replace(previous, budgets=budgets)
    try:
        yield
    finally:
        gv.config = previous


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    try:
        request = CommandRequest.parse(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    command = COMMANDS[(request.group, request.command)]
    with logger.command(request.subcommand):
        logger.debug(f"Options: {dict(request.options)}")
        try:
            with logger.timed(request.subcommand), _budget_override(request.option("budget")):
                output = command.handler(request)
        except BudgetError as e:
            logger.error(f"Budget exceeded: {e}")
            return EXIT_BUDGET
        except (FlagExpError, ValueError, ArithmeticError) as e:
            logger.error(str(e))
            return EXIT_USAGE

    stdout.write(render(output, request.output_format))
    return EXIT_OK
