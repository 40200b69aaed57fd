from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .errors import UnsupportedFamily


class Family(Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    @staticmethod
    def from_str(value) -> "Family":  # noqa: ANN001
        if not value:
            msg = "Root system family is required and cannot be empty."
            raise ValueError(msg)

        match str(value).strip().upper():
            case "A":
                return Family.A
            case "B":
                return Family.B
            case "C":
                return Family.C
            case "D":
                return Family.D
            case "E" | "F" | "G":
                msg = f"Exceptional family {value!r} is not supported, use A, B, C or D."
                raise UnsupportedFamily(msg)
            case _:
                msg = f"Unknown root system family {value!r}, use A, B, C or D."
                raise UnsupportedFamily(msg)

    def min_rank(self) -> int:
        match self:
            case Family.A:
                return 1
            case Family.B | Family.C:
                return 2
            case Family.D:
                return 3


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"

    @staticmethod
    def from_str(value) -> "OutputFormat":  # noqa: ANN001
        match str(value).strip().lower():
            case "json":
                return OutputFormat.JSON
            case "csv":
                return OutputFormat.CSV
            case "table":
                return OutputFormat.TABLE
            case _:
                msg = "Output format must be 'json', 'csv' or 'table'."
                raise ValueError(msg)


class AmbientKind(Enum):
    PROJECTIVE = "projective"
    GRASSMANN = "grassmann"
    FULLFLAG = "fullflag"
    QUADRIC = "quadric"


class Provenance(Enum):
    EXACT = "exact"
    FLOAT = "float"


class KhintchineVerdict(Enum):
    CONVERGENT = "Convergent"
    DIVERGENT = "Divergent"


class PsiParams(NamedTuple):
    """psi(u) = c * (log u)^-gamma * (log log u)^-delta"""

    c: Fraction
    gamma: Fraction
    delta: Fraction


class QuadricProfile(NamedTuple):
    beta: Fraction
    khintchine_power: int
    loglog_power: int
