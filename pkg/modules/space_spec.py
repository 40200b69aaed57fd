"""
Parser and printer for space specifications:

    projective:d
    grassmannian:l,d
    flag:<FAMILY><rank>:theta=i,j,...:chi=n1,...,nr
    quadric:n[,x0]

Indices in theta are 1-based. parse(format(spec)) == spec for every spec.
"""

from dataclasses import dataclass

from .enums import Family
from .errors import FlagExpError, SpaceSpecError, UnsupportedFamily
from .flag_exponents import FlagVarietySpec
from .root_core import build_root_system


@dataclass(frozen=True)
class ProjectiveSpec:
    d: int

    def flag_variety(self) -> FlagVarietySpec:
        return FlagVarietySpec.projective(self.d)


@dataclass(frozen=True)
class GrassmannianSpec:
    ell: int
    d: int

    def flag_variety(self) -> FlagVarietySpec:
        return FlagVarietySpec.grassmannian(self.ell, self.d)


@dataclass(frozen=True)
class FlagSpec:
    family: Family
    rank: int
    theta: tuple[int, ...]  # 1-based, sorted
    chi: tuple[int, ...]

    def flag_variety(self) -> FlagVarietySpec:
        rs = build_root_system(self.family, self.rank)
        return FlagVarietySpec(rs, frozenset(i - 1 for i in self.theta), self.chi)


@dataclass(frozen=True)
class QuadricSpec:
    n: int
    is_x0: bool = False

    def flag_variety(self) -> FlagVarietySpec:
        """The split quadric of dimension n as SO(n+2)/P with chi = varpi_1."""
        m, odd = divmod(self.n + 2, 2)
        family = Family.B if odd else Family.D
        rs = build_root_system(family, m)
        theta = frozenset(range(1, m))
        return FlagVarietySpec(rs, theta, tuple(1 if i == 0 else 0 for i in range(m)))


SpaceSpec = ProjectiveSpec | GrassmannianSpec | FlagSpec | QuadricSpec


class _Reader:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def fail(self, message: str, position: int | None = None) -> SpaceSpecError:
        return SpaceSpecError(message, self.text, self.pos if position is None else position)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def expect(self, literal: str) -> None:
        if not self.text.startswith(literal, self.pos):
            msg = f"expected {literal!r}"
            raise self.fail(msg)
        self.pos += len(literal)

    def word(self) -> str:
        start = self.pos
        while not self.at_end() and self.text[self.pos].isalpha():
            self.pos += 1
        return self.text[start : self.pos]

    def integer(self) -> int:
        start = self.pos
        while not self.at_end() and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            msg = "expected an integer"
            raise self.fail(msg)
        return int(self.text[start : self.pos])

    def integer_list(self, *, allow_empty: bool) -> list[int]:
        if self.at_end() or not self.text[self.pos].isdigit():
            if allow_empty:
                return []
            msg = "expected an integer"
            raise self.fail(msg)

        values = [self.integer()]
        while not self.at_end() and self.text[self.pos] == ",":
            self.pos += 1
            values.append(self.integer())
        return values

    def finish(self) -> None:
        if not self.at_end():
            msg = f"unexpected {self.text[self.pos]!r}"
            raise self.fail(msg)


def spacespec_parse(text: str) -> SpaceSpec:
    reader = _Reader(text)
    kind_start = reader.pos
    kind = reader.word()
    reader.expect(":")

    match kind:
        case "projective":
            start = reader.pos
            d = reader.integer()
            reader.finish()
            if d < 2:  # noqa: PLR2004
                msg = "projective space needs d >= 2"
                raise reader.fail(msg, start)
            spec: SpaceSpec = ProjectiveSpec(d)

        case "grassmannian":
            start = reader.pos
            ell = reader.integer()
            reader.expect(",")
            d = reader.integer()
            reader.finish()
            if not 1 <= ell < d:
                msg = "grassmannian needs 1 <= l < d"
                raise reader.fail(msg, start)
            spec = GrassmannianSpec(ell, d)

        case "flag":
            family_pos = reader.pos
            letter = reader.word()
            try:
                family = Family.from_str(letter)
            except (UnsupportedFamily, ValueError) as e:
                msg = f"unknown family {letter!r}"
                raise reader.fail(msg, family_pos) from e
            rank = reader.integer()
            reader.expect(":theta=")
            theta = reader.integer_list(allow_empty=True)
            reader.expect(":chi=")
            chi_pos = reader.pos
            chi = reader.integer_list(allow_empty=False)
            reader.finish()
            spec = FlagSpec(family, rank, tuple(sorted(set(theta))), tuple(chi))
            try:
                spec.flag_variety()
            except FlagExpError as e:
                raise reader.fail(str(e), chi_pos) from e
            except ValueError as e:
                raise reader.fail(str(e), family_pos) from e

        case "quadric":
            start = reader.pos
            n = reader.integer()
            is_x0 = False
            if not reader.at_end():
                reader.expect(",x0")
                is_x0 = True
            reader.finish()
            if n < 1:
                msg = "quadric dimension must be at least 1"
                raise reader.fail(msg, start)
            spec = QuadricSpec(n, is_x0)

        case _:
            msg = f"unknown space kind {kind!r} (use projective, grassmannian, flag or quadric)"
            raise reader.fail(msg, kind_start)

    return spec


def spacespec_format(spec: SpaceSpec) -> str:
    match spec:
        case ProjectiveSpec(d=d):
            return f"projective:{d}"
        case GrassmannianSpec(ell=ell, d=d):
            return f"grassmannian:{ell},{d}"
        case FlagSpec(family=family, rank=rank, theta=theta, chi=chi):
            theta_text = ",".join(str(i) for i in theta)
            chi_text = ",".join(str(n) for n in chi)
            return f"flag:{family.value}{rank}:theta={theta_text}:chi={chi_text}"
        case QuadricSpec(n=n, is_x0=is_x0):
            return f"quadric:{n},x0" if is_x0 else f"quadric:{n}"
    msg = f"Not a space spec: {spec!r}"
    raise TypeError(msg)
