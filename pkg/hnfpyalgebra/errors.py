"""
Exception taxonomy of the algebra engine.

Core errors derive from HnfError and map to exit code 1 on the command line, usage errors derive from UsageError and
map to exit code 2.
"""


class HnfError(Exception):
    """
    Base class for all typed errors raised by the algebra core
    """

    def __init__(self, message: str = "", segment_index: int = None):
        """

        Parameters
        ----------
        message: str
            Human readable description
        segment_index: int
            Index of the offending segment or breakpoint entry, if the error relates to one. Used by the parser to
            attach source spans.
        """
        super().__init__(message)
        self.segment_index = segment_index


class ZeroDenominator(HnfError):
    pass


class ZeroReciprocal(HnfError):
    pass


class IdenticallyZero(HnfError):
    pass


class InteriorPole(HnfError):
    pass


class SegmentOrderViolation(HnfError):
    pass


class UnsortedBreakpoints(HnfError):
    pass


class OutOfDomain(HnfError):
    pass


class DomainMismatch(HnfError):
    pass


class NotSContinuous(HnfError):
    pass


class NotQuasiMinimal(HnfError):
    pass


class NotHContinuous(HnfError):
    pass


class ZeroDivisor(HnfError):
    pass


class NonRepresentablePoint(HnfError):
    """
    Raised when an exact result would need an irrational breakpoint
    """

    def __init__(self, message: str = "", isolating_interval: tuple = None, segment_index: int = None):
        """

        Parameters
        ----------
        message: str
            Human readable description
        isolating_interval: tuple
            Rational pair (lo, hi) containing exactly one offending point
        segment_index: int
            Index of the offending segment
        """
        super().__init__(message, segment_index)
        self.isolating_interval = isolating_interval


class ZeroFunction(HnfError):
    pass


class IncompatibleImages(HnfError):
    pass


class IdealNotDense(HnfError):
    pass


class EpsOutOfRange(HnfError):
    pass


class ModulusViolated(HnfError):
    pass


class SandwichViolated(HnfError):
    pass


class BridgingFailed(HnfError):
    """
    Raised when no certified linear bridge could be fitted at a breakpoint
    """

    def __init__(self, message: str = "", breakpoint=None):
        super().__init__(message)
        self.breakpoint = breakpoint


class LimitsDisagree(HnfError):
    pass


class UsageError(Exception):
    """
    Base class for malformed input on the user-facing surface
    """
    pass


class ParseError(UsageError):
    """
    Syntax error in a function literal
    """

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConfigError(UsageError):
    pass
