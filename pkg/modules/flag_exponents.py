"""
Symbolic invariants of a flag variety X = P_theta \\ G with a height given by a dominant weight chi.

Everything here is exact: inputs are integer weight coefficients and the results are
Fractions computed from the root data in root_core.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from . import exact_linalg as la
from .enums import Family, KhintchineVerdict, PsiParams, QuadricProfile
from .errors import InvalidFlagSpec, NotAWeight
from .root_core import ChamberVector, RootSystem, build_root_system

if TYPE_CHECKING:
    from typing import Self

# +inf is the only non-rational exponent value
Exponent = Fraction | float


def format_exponent(value: Exponent) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return la.format_fraction(value)


def parse_exponent(text: str) -> Exponent:
    if text.strip().lower() in {"inf", "+inf", "infinity"}:
        return math.inf
    return la.parse_fraction(text)


@dataclass(frozen=True)
class FlagVarietySpec:
    rs: RootSystem
    theta: frozenset[int]  # 0-based simple-root indices generating the Levi
    chi: tuple[int, ...]  # chi = sum chi[i] * varpi_i

    def __post_init__(self) -> None:
        rank = self.rs.rank
        if len(self.chi) != rank:
            msg = f"chi needs {rank} coefficients for {self.rs.name}, got {len(self.chi)}."
            raise InvalidFlagSpec(msg)
        if any(not isinstance(n, int) or isinstance(n, bool) or n < 0 for n in self.chi):
            msg = "chi coefficients must be nonnegative integers."
            raise InvalidFlagSpec(msg)
        if any(not 0 <= i < rank for i in self.theta):
            msg = f"theta indices must lie in 1..{rank}."
            raise InvalidFlagSpec(msg)
        if len(self.theta) == rank:
            msg = "theta must be a proper subset of the simple roots."
            raise InvalidFlagSpec(msg)
        for i, n in enumerate(self.chi):
            if (n > 0) == (i in self.theta):
                msg = f"chi must be positive exactly off theta (index {i + 1} has coefficient {n})."
                raise InvalidFlagSpec(msg)

    def __hash__(self) -> int:
        return hash((self.rs.name, self.theta, self.chi))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlagVarietySpec):
            return NotImplemented
        return (
            self.rs.same_as(other.rs) and self.theta == other.theta and self.chi == other.chi
        )

    @property
    def name(self) -> str:
        theta = ",".join(str(i + 1) for i in sorted(self.theta))
        chi = ",".join(str(n) for n in self.chi)
        return f"flag:{self.rs.name}:theta={theta}:chi={chi}"

    @property
    def is_maximal(self) -> bool:
        return len(self.theta) == self.rs.rank - 1

    @property
    def off_theta(self) -> list[int]:
        return [i for i in range(self.rs.rank) if i not in self.theta]

    @property
    def chi_vector(self) -> la.Vector:
        return self.rs.weight_vector(self.chi)

    def pair(self, y: ChamberVector) -> Fraction:
        """<chi, Y> = sum n_i omega_i(Y) / b_i."""
        return sum(
            (
                Fraction(n, b) * value
                for n, b, value in zip(self.chi, self.rs.fw_multipliers, y.eval_coords, strict=True)
            ),
            Fraction(0),
        )

    @classmethod
    def create(cls, rs: RootSystem, theta: Iterable[int], chi: Iterable[int]) -> Self:
        return cls(rs, frozenset(theta), tuple(chi))

    @classmethod
    def projective(cls, d: int) -> Self:
        """P^{d-1} as SL_d / P with the chi = varpi_1 height."""
        if d < 2:  # noqa: PLR2004
            msg = "Projective space needs d >= 2."
            raise InvalidFlagSpec(msg)
        return cls.grassmannian(1, d)

    @classmethod
    def grassmannian(cls, ell: int, d: int) -> Self:
        """Grass(ell, d) with the Pluecker height chi = varpi_ell."""
        if not 1 <= ell < d:
            msg = f"Grassmannian needs 1 <= l < d, got l={ell}, d={d}."
            raise InvalidFlagSpec(msg)
        rs = build_root_system(Family.A, d - 1)
        theta = frozenset(i for i in range(d - 1) if i != ell - 1)
        chi = tuple(1 if i == ell - 1 else 0 for i in range(d - 1))
        return cls(rs, theta, chi)

    @classmethod
    def with_anticanonical(cls, rs: RootSystem, theta: Iterable[int]) -> Self:
        theta = frozenset(theta)
        return cls(rs, theta, anticanonical_weight(rs, theta))

    def to_dict(self) -> dict:
        return {
            "root_system": self.rs.name,
            "theta": sorted(i + 1 for i in self.theta),
            "chi": list(self.chi),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        name = str(data["root_system"])
        rs = build_root_system(Family.from_str(name[0]), int(name[1:]))
        return cls(rs, frozenset(int(i) - 1 for i in data["theta"]), tuple(int(n) for n in data["chi"]))


@dataclass(frozen=True)
class KhintchineProfile:
    a_chi: Fraction
    b_chi: int
    beta_X: Fraction  # noqa: N815
    u_chi: Fraction
    v_chi: int

    def to_dict(self) -> dict:
        return {
            "a_chi": la.format_fraction(self.a_chi),
            "b_chi": self.b_chi,
            "beta_X": la.format_fraction(self.beta_X),
            "u_chi": la.format_fraction(self.u_chi),
            "v_chi": self.v_chi,
        }


def flow_element(fv: FlagVarietySpec) -> ChamberVector:
    values = [Fraction(0) if i in fv.theta else Fraction(-1) for i in range(fv.rs.rank)]
    return ChamberVector.from_alpha_values(fv.rs, values)


def beta_almost_sure(fv: FlagVarietySpec) -> Fraction:
    chi_y = fv.pair(flow_element(fv))
    if chi_y >= 0:
        msg = f"chi(Y) = {chi_y} is not negative for {fv.name}."
        raise AssertionError(msg)
    return -1 / chi_y


def cc_dimension(rs: RootSystem, theta: frozenset[int]) -> int:
    """Carnot-Caratheodory dimension: the sum of the levels of the roots outside <theta>."""
    return sum(root.level(theta) for root in rs.positive_roots)


def level_dimensions(rs: RootSystem, theta: frozenset[int]) -> dict[int, int]:
    return {lvl: len(roots) for lvl, roots in rs.levels(theta).items()}


def anticanonical_weight(rs: RootSystem, theta: frozenset[int]) -> tuple[int, ...]:
    """Sum of the roots of the unipotent radical, written over the fundamental weights."""

    theta = frozenset(theta)
    if len(theta) >= rs.rank:
        msg = "theta must be a proper subset of the simple roots."
        raise InvalidFlagSpec(msg)

    total = rs.root_sum(theta)
    coefficients = [
        2 * la.dot(total, alpha) / length
        for alpha, length in zip(rs.simple_roots, rs.root_lengths_squared, strict=True)
    ]
    if any(c.denominator != 1 for c in coefficients):
        msg = f"Radical root sum of {rs.name} is not integral over the fundamental weights."
        raise NotAWeight(msg)

    result = tuple(int(c) for c in coefficients)
    if any((n > 0) == (i in theta) for i, n in enumerate(result)):
        msg = "Anticanonical weight does not vanish exactly on theta."
        raise AssertionError(msg)
    return result


def _argmin_with_count(ratios: list[Fraction]) -> tuple[Fraction, int]:
    best = min(ratios)
    return best, sum(1 for r in ratios if r == best)


def khintchine_constants(fv: FlagVarietySpec) -> tuple[Fraction, int]:
    """(a_chi, b_chi): min over i of rho(Y_i)/chi(Y_i), skipping chi(Y_i) = 0, and its multiplicity."""

    rho = fv.rs.root_sum()
    chi = fv.chi_vector
    ratios = []
    for y in fv.rs.dual_basis:
        chi_y = la.dot(chi, y)
        if chi_y != 0:
            ratios.append(la.dot(rho, y) / chi_y)
    return _argmin_with_count(ratios)


def counting_exponents(fv: FlagVarietySpec) -> tuple[Fraction, int]:
    """(u_chi, v_chi) for the rational point count N(T) ~ T^u (log T)^(v-1)."""

    radical = anticanonical_weight(fv.rs, fv.theta)
    ratios = [Fraction(radical[i], fv.chi[i]) for i in fv.off_theta]
    u = max(ratios)
    # codimension of the face of the dominant cone containing u chi - rho_X, counted off theta
    v = sum(1 for r in ratios if r == u)
    return u, v


def counting_bound(fv: FlagVarietySpec) -> Fraction:
    """u_chi / dim_cc X, an upper bound for beta_chi(X)."""
    u, _ = counting_exponents(fv)
    return u / cc_dimension(fv.rs, fv.theta)


def khintchine_profile(fv: FlagVarietySpec) -> KhintchineProfile:
    a, b = khintchine_constants(fv)
    u, v = counting_exponents(fv)
    return KhintchineProfile(a_chi=a, b_chi=b, beta_X=beta_almost_sure(fv), u_chi=u, v_chi=v)


def khintchine_classify(profile: KhintchineProfile, psi: PsiParams) -> KhintchineVerdict:
    """Divergence of the Khintchine integral for psi(u) = c (log u)^-gamma (log log u)^-delta."""

    c, gamma, delta = (la.to_fraction(x) for x in psi)
    if c <= 0:
        msg = "psi needs a positive constant c."
        raise ValueError(msg)

    gamma_threshold = profile.beta_X / profile.a_chi
    delta_threshold = profile.b_chi * gamma_threshold

    if gamma < gamma_threshold or (gamma == gamma_threshold and delta <= delta_threshold):
        return KhintchineVerdict.DIVERGENT
    return KhintchineVerdict.CONVERGENT


def quadric_profile(n: int, is_x0: bool) -> QuadricProfile:  # noqa: FBT001
    if n < 1:
        msg = "Quadric dimension must be at least 1."
        raise ValueError(msg)
    return QuadricProfile(beta=Fraction(1), khintchine_power=n, loglog_power=1 if is_x0 else 0)


def quadric_khintchine_profile(n: int, is_x0: bool) -> KhintchineProfile:  # noqa: FBT001
    """The integral test for an n-dimensional quadric in the same shape as the flag-variety one."""
    profile = quadric_profile(n, is_x0)
    b = profile.loglog_power + 1
    return KhintchineProfile(
        a_chi=Fraction(n), b_chi=b, beta_X=profile.beta, u_chi=Fraction(n), v_chi=b
    )
