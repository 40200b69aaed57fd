"""
Ambient spaces of rational points seen through lattices: the cone of rational points
inside a representation, heights, and the cone minimum r_chi of a lattice.

A lattice of rank d gives the projective or Grassmannian picture directly: rational points
of P^{d-1} are primitive integer vectors, rational points of Grass(l, d) are primitive
decomposable vectors of Lambda^l Z^d. Quadric points are the integer zeros of the form.
The highest-weight line is always coordinate 0 (the subset (0, ..., l-1) in a wedge).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from . import exact_linalg as la
from . import global_vars as gv
from .enums import AmbientKind, Family
from .errors import EnumerationBudgetExceeded, InvalidFlagSpec, ZeroVector
from .flag_exponents import FlagVarietySpec, flow_element
from .lattice_reduction import shortest_in_cone
from .lattices import (
    FLOAT_SLACK,
    LatticeBasis,
    ReducedLattice,
    is_decomposable,
    wedge_coordinates,
    wedge_lattice,
)
from .logger import logger
from .root_core import build_root_system
from .space_spec import FlagSpec, GrassmannianSpec, ProjectiveSpec, QuadricSpec, SpaceSpec

if TYPE_CHECKING:
    from typing import Self

# radius doublings before the cone search gives up on its own
MAX_DOUBLINGS = 64
# moduli above this are not checked by brute force
MAX_RESIDUE_MODULUS = 1_000_000


@dataclass(frozen=True)
class AmbientSpace:
    kind: AmbientKind
    d: int  # rank of the lattice (number of variables for a quadric)
    ell: int = 1
    chi: tuple[int, ...] = ()  # fullflag: chi = sum chi[k-1] varpi_k
    form: la.Matrix | None = None  # quadric: Q(x) = x^T form x

    @classmethod
    def projective(cls, d: int) -> Self:
        FlagVarietySpec.projective(d)
        return cls(AmbientKind.PROJECTIVE, d)

    @classmethod
    def grassmann(cls, ell: int, d: int) -> Self:
        FlagVarietySpec.grassmannian(ell, d)
        return cls(AmbientKind.GRASSMANN, d, ell)

    @classmethod
    def fullflag(cls, chi: Sequence[int]) -> Self:
        """SL_d / P with the height chi = sum n_k varpi_k; theta is where n_k vanishes."""
        space = cls(AmbientKind.FULLFLAG, len(chi) + 1, chi=tuple(chi))
        space.flag_variety()
        return space

    @classmethod
    def from_form(cls, form: Sequence[Sequence]) -> Self:
        matrix = la.mat(form)
        n = len(matrix)
        if n == 0 or any(len(row) != n for row in matrix):
            msg = "A quadratic form needs a square matrix."
            raise ValueError(msg)
        if matrix != la.transpose(matrix):
            msg = "A quadratic form needs a symmetric matrix."
            raise ValueError(msg)
        return cls(AmbientKind.QUADRIC, n, form=matrix)

    @classmethod
    def quadric(cls, n: int, is_x0: bool = False) -> Self:  # noqa: FBT001, FBT002
        """
        The n-dimensional quadric in P^{n+1}. The split form pairs x_i with x_{N-1-i};
        the other one is x_0 x_{N-1} - (x_1^2 + ... + x_{N-2}^2).
        """

        if n < 1:
            msg = "Quadric dimension must be at least 1."
            raise ValueError(msg)

        size = n + 2
        half = Fraction(1, 2)
        form = [[Fraction(0)] * size for _ in range(size)]
        if is_x0:
            for i in range(size // 2):
                form[i][size - 1 - i] = form[size - 1 - i][i] = half
            if size % 2:
                form[size // 2][size // 2] = Fraction(1)
        else:
            form[0][size - 1] = form[size - 1][0] = half
            for i in range(1, size - 1):
                form[i][i] = Fraction(-1)
        return cls.from_form(form)

    @classmethod
    def from_spec(cls, spec: SpaceSpec) -> Self:
        match spec:
            case ProjectiveSpec(d=d):
                return cls.projective(d)
            case GrassmannianSpec(ell=ell, d=d):
                return cls.grassmann(ell, d)
            case FlagSpec(family=Family.A, chi=chi):
                return cls.fullflag(chi)
            case FlagSpec():
                msg = "Lattice computations need a type A flag variety."
                raise InvalidFlagSpec(msg)
            case QuadricSpec(n=n, is_x0=is_x0):
                return cls.quadric(n, is_x0)
        msg = f"Not a space spec: {spec!r}"
        raise TypeError(msg)

    @property
    def name(self) -> str:
        match self.kind:
            case AmbientKind.PROJECTIVE:
                return f"projective:{self.d}"
            case AmbientKind.GRASSMANN:
                return f"grassmannian:{self.ell},{self.d}"
            case AmbientKind.FULLFLAG:
                return f"fullflag:{','.join(str(n) for n in self.chi)}"
            case AmbientKind.QUADRIC:
                return f"quadric:{self.d - 2}"

    def flag_variety(self) -> FlagVarietySpec | None:
        match self.kind:
            case AmbientKind.PROJECTIVE:
                return FlagVarietySpec.projective(self.d)
            case AmbientKind.GRASSMANN:
                return FlagVarietySpec.grassmannian(self.ell, self.d)
            case AmbientKind.FULLFLAG:
                rs = build_root_system(Family.A, self.d - 1)
                theta = frozenset(i for i, n in enumerate(self.chi) if n == 0)
                return FlagVarietySpec(rs, theta, self.chi)
        return None

    def flow_diag(self) -> tuple[float, ...]:
        """Diagonal of the flow Y acting on the lattice coordinates."""
        fv = self.flag_variety()
        if fv is None:
            return (-1.0, *(0.0,) * (self.d - 2), 1.0)
        return tuple(float(v) for v in flow_element(fv).diag_coords)

    def neg_chi_y(self) -> Fraction:
        """-chi(Y), so that beta = 1 / (-chi(Y) - gamma)."""
        fv = self.flag_variety()
        if fv is None:
            return Fraction(1)
        return -fv.pair(flow_element(fv))

    def representations(self) -> list[tuple[int, int]]:
        """(k, multiplicity) for each Lambda^k R^d entering the height."""
        match self.kind:
            case AmbientKind.GRASSMANN:
                return [(self.ell, 1)]
            case AmbientKind.FULLFLAG:
                return [(k, n) for k, n in enumerate(self.chi, start=1) if n]
        return [(1, 1)]

    def in_cone(self, p: Sequence[int], k: int = 1) -> bool:
        """Whether the integer vector p of Lambda^k Z^d is a rational point."""
        if not any(p):
            return False
        match self.kind:
            case AmbientKind.PROJECTIVE:
                return True
            case AmbientKind.GRASSMANN | AmbientKind.FULLFLAG:
                return is_decomposable(p, self.d, k)
            case AmbientKind.QUADRIC:
                return quadratic_value(self.form, p) == 0
        return False

    def to_dict(self) -> dict:
        result: dict = {"kind": self.kind.value, "d": self.d}
        if self.kind == AmbientKind.GRASSMANN:
            result["ell"] = self.ell
        if self.kind == AmbientKind.FULLFLAG:
            result["chi"] = list(self.chi)
        if self.form is not None:
            result["form"] = [[la.format_fraction(x) for x in row] for row in self.form]
        return result


def quadratic_value(form: la.Matrix, x: Sequence[int]) -> Fraction:
    return la.dot(x, la.mat_vec(form, la.vec(x)))


def _squarefree(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    result = 1
    p = 2
    while p * p <= n:
        exponent = 0
        while n % p == 0:
            n //= p
            exponent += 1
        if exponent % 2:
            result *= p
        p += 1
    return sign * result * n


def _is_square_mod(a: int, m: int) -> bool | None:
    m = abs(m)
    if m == 1:
        return True
    if m > MAX_RESIDUE_MODULUS:
        return None
    a %= m
    return any(x * x % m == a for x in range(m // 2 + 1))


def _diagonalize(form: la.Matrix) -> list[Fraction] | None:
    """Diagonal of a rationally congruent form, or None when the form is degenerate."""

    m = [list(row) for row in form]
    n = len(m)
    for i in range(n):
        if m[i][i] == 0:
            j = next((j for j in range(i + 1, n) if m[j][j] != 0), None)
            if j is not None:
                m[i], m[j] = m[j], m[i]
                for row in m:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next((j for j in range(i + 1, n) if m[i][j] != 0), None)
                if j is None:
                    return None
                # x_i <- x_i + x_j
                m[i] = [a + b for a, b in zip(m[i], m[j], strict=True)]
                for row in m:
                    row[i] += row[j]

        pivot = m[i][i]
        for j in range(i + 1, n):
            f = m[j][i] / pivot
            if f:
                m[j] = [a - f * b for a, b in zip(m[j], m[i], strict=True)]
                for row in m:
                    row[j] -= f * row[i]

    return [m[i][i] for i in range(n)]


def _legendre_isotropic(a: int, b: int, c: int) -> bool | None:
    coeffs = [_squarefree(a), _squarefree(b), _squarefree(c)]
    changed = True
    while changed:
        changed = False
        for i, j in ((0, 1), (0, 2), (1, 2)):
            g = math.gcd(coeffs[i], coeffs[j])
            if g > 1:
                k = 3 - i - j
                coeffs[i] //= g
                coeffs[j] //= g
                coeffs[k] = _squarefree(coeffs[k] * g)
                changed = True

    a, b, c = coeffs
    if (a > 0) == (b > 0) == (c > 0):
        return False

    checks = [_is_square_mod(-b * c, a), _is_square_mod(-c * a, b), _is_square_mod(-a * b, c)]
    if False in checks:
        return False
    if None in checks:
        return None
    return True


def anisotropy_certificate(form: la.Matrix) -> bool | None:
    """
    True when Q has no nonzero rational zero, False when it has one, None when undecided.
    Decided for definite forms, forms in at most three variables and indefinite forms in
    five or more.
    """

    diagonal = _diagonalize(form)
    if diagonal is None:
        return False

    scale = math.lcm(*(x.denominator for x in diagonal))
    coeffs = [int(x * scale) for x in diagonal]
    if all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs):
        return True

    match len(coeffs):
        case 2:
            product = -coeffs[0] * coeffs[1]
            return math.isqrt(product) ** 2 != product
        case 3:
            isotropic = _legendre_isotropic(*coeffs)
            return None if isotropic is None else not isotropic
        case 4:
            return None
    return False


def _primitive(p: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*p)
    if g == 0:
        msg = "A rational point cannot have all coordinates zero."
        raise ZeroVector(msg)
    return tuple(x // g for x in p)


def _integer_coordinates(point: Sequence) -> tuple[int, ...]:
    values = [la.to_fraction(x) for x in point]
    scale = math.lcm(*(x.denominator for x in values))
    return tuple(int(x * scale) for x in values)


def height_squared(point: Sequence) -> int:
    """
    H(x)^2 for a rational point: a vector of coordinates for P^{d-1} or a quadric, or the l
    rows spanning a point of Grass(l, d).
    """

    if point and isinstance(point[0], Sequence) and not isinstance(point[0], str):
        rows = [_integer_coordinates(row) for row in point]
        p = wedge_coordinates(rows)
    else:
        p = _integer_coordinates(point)
    return sum(x * x for x in _primitive(p))


def height(point: Sequence) -> float:
    return math.sqrt(height_squared(point))


def _cone_log_minimum(
    space: AmbientSpace, k: int, reduced: ReducedLattice, log_cone_constant: float
) -> float:
    """log of the shortest rational point of Lambda^k inside the cone |pi+ v| >= c |v|."""

    rep = reduced.lattice

    def log_if_in_cone(p: tuple[int, ...]) -> float | None:
        if not space.in_cone(p, k):
            return None
        first = rep.vector(p)[0]
        if first == 0:
            return None
        log_norm = rep.log_norm(p)
        log_plus = rep.log_scales[0] + math.log(abs(float(first)))
        return log_norm if log_plus >= log_cone_constant + log_norm - 1e-12 else None

    def accept(z: tuple[int, ...]) -> bool:
        return log_if_in_cone(reduced.original(z)) is not None

    mu, bsq = reduced.gso
    cone_constant = math.exp(log_cone_constant)
    radius = math.exp(min(reduced.row_log_norm(i) for i in range(rep.dim)))
    for _ in range(MAX_DOUBLINGS):
        bound = radius * (1 + FLOAT_SLACK)
        found = shortest_in_cone(mu, bsq, reduced.axis, cone_constant, bound, accept)
        if found:
            return min(log_if_in_cone(reduced.original(z)) for _, z in found)
        radius *= 2

    msg = f"No rational point in the cone within {MAX_DOUBLINGS} radius doublings."
    raise EnumerationBudgetExceeded(msg)


def log_r_chi(
    lattice: LatticeBasis,
    space: AmbientSpace,
    reductions: dict[int, ReducedLattice] | None = None,
    cone_constant: float | None = None,
) -> float:
    """
    log r_chi of a lattice: the product over the representations of the height of the
    shortest rational point whose highest-weight component is at least cone_constant of its
    norm. Returns +inf for quadrics certified to have no rational point.
    """

    if lattice.dim != space.d:
        msg = f"Lattice has rank {lattice.dim}, the space needs {space.d}."
        raise ValueError(msg)
    if space.kind == AmbientKind.QUADRIC and anisotropy_certificate(space.form):
        return math.inf

    c = gv.config.lab.cone_constant if cone_constant is None else cone_constant
    if not 0 < c <= 1:
        msg = "The cone constant must lie in (0, 1]."
        raise ValueError(msg)

    reductions = reductions if reductions is not None else {}
    total = 0.0
    for k, multiplicity in space.representations():
        reduced = reductions.get(k)
        if reduced is None:
            rep = lattice if k == 1 else wedge_lattice(lattice, k)
            reduced = rep.reduce()
        total += multiplicity * _cone_log_minimum(space, k, reduced, math.log(c))

    logger.debug(f"log r_chi = {total:.6g} on {space.name}")
    return total


def r_chi(
    lattice: LatticeBasis,
    space: AmbientSpace,
    reductions: dict[int, ReducedLattice] | None = None,
    cone_constant: float | None = None,
) -> float:
    log_value = log_r_chi(lattice, space, reductions, cone_constant)
    return math.inf if log_value == math.inf else math.exp(log_value)
