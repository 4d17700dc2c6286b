"""Exception hierarchy. Every class carries the process exit code used by the CLI."""


class UibError(Exception):
    exit_code = 1


class ParseError(UibError):
    exit_code = 2


class IoError(UibError):
    exit_code = 3


class ConstraintViolation(UibError):
    exit_code = 4

    def __init__(self, field: str, rule: str):
        self.field = field
        self.rule = rule
        super().__init__(f"{field}: {rule}")


class DomainError(UibError, ValueError):
    exit_code = 5


class EmptySample(DomainError):
    exit_code = 6


class OutOfUnitInterval(DomainError):
    exit_code = 7

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"sample value at index {index} lies outside [0, 1]")


class ZeroCount(DomainError):
    exit_code = 8


class WindowOverflow(DomainError):
    exit_code = 9


class NonPositiveBandwidth(DomainError):
    exit_code = 10


class BandwidthTooSmall(DomainError):
    exit_code = 11


class NonIncreasingGrid(DomainError):
    exit_code = 12


class DuplicateGridPoint(NonIncreasingGrid):
    exit_code = 13


class InfeasibleTube(DomainError):
    exit_code = 14


class BadPath(DomainError):
    exit_code = 15


class EmptySeries(DomainError):
    exit_code = 16


class NonFiniteValue(DomainError):
    exit_code = 17

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"non-finite value at index {index}")
