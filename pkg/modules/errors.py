class FlagExpError(Exception):
    """Base class for every error raised by the flag-exponent modules."""


class BudgetError(FlagExpError):
    """Raised when a computation would exceed a configured enumeration budget."""


class UnsupportedFamily(FlagExpError, ValueError):
    pass


class RankTooLarge(BudgetError):
    pass


class GroupTooLarge(BudgetError):
    pass


class EnumerationBudgetExceeded(BudgetError):
    pass


class MismatchedRootSystem(FlagExpError, ValueError):
    pass


class EmptyFamily(FlagExpError, ValueError):
    pass


class PreconditionViolated(FlagExpError, ValueError):
    pass


class BadEndpoints(FlagExpError, ValueError):
    pass


class InvalidFlagSpec(FlagExpError, ValueError):
    pass


class NotAWeight(FlagExpError, ArithmeticError):
    pass


class InvalidFlagData(FlagExpError, ValueError):
    pass


class GapNotCertified(FlagExpError):
    pass


class AllInfinite(FlagExpError, ValueError):
    pass


class PoleOrBeyond(FlagExpError, ValueError):
    pass


class ZeroVector(FlagExpError, ValueError):
    pass


class BadSampleCount(FlagExpError, ValueError):
    pass


class SpaceSpecError(FlagExpError, ValueError):
    def __init__(self, message: str, text: str, position: int) -> None:
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class UsageError(FlagExpError, ValueError):
    pass
