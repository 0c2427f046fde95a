"""Exception types raised across the package."""


class FairDistrictingError(Exception):
    """Base class for all package errors."""


class MalformedInputError(FairDistrictingError, ValueError):
    pass


class UnsupportedInstanceError(FairDistrictingError, ValueError):
    pass


class InfeasibleTargetError(FairDistrictingError, ValueError):
    pass


class WrongSolverError(FairDistrictingError, ValueError):
    pass


class ResourceLimitError(FairDistrictingError, RuntimeError):
    """A solver refused to run because its state space exceeds the budget."""

    def __init__(self, message: str, required: int, budget: int):
        super().__init__(f"{message}: requires {required}, budget is {budget}")
        self.required = required
        self.budget = budget


class ParseError(FairDistrictingError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
