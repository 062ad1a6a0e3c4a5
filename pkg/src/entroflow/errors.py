"""
Exceptions raised by entroflow.

Every error derives from `EntroflowError` and from the builtin exception that
describes it best, so callers can catch either. The command line maps the
`ValueError` family to exit code 2 (bad configuration or hypothesis) and
everything else to exit code 1.
"""


class EntroflowError(Exception):
    pass


class ParameterOutOfRange(EntroflowError, ValueError):
    """A family or potential parameter lies outside its admissible window."""


class HypothesisViolation(EntroflowError, ValueError):
    """
    A structural hypothesis required for a theorem verdict does not hold.
    `report` carries the raw (advisory) numbers when they could be computed.
    """

    def __init__(self, msg: str, report: object = None) -> None:
        super().__init__(msg)
        self.report = report


class ConsistencyError(EntroflowError, ValueError):
    """User-supplied evaluators disagree with each other."""


class DimensionMismatch(EntroflowError, ValueError):
    pass


class FaceClassificationError(EntroflowError, ValueError):
    """A boundary operation was requested on a truncation face."""


class MassMismatch(EntroflowError, ValueError):
    pass


class PositivityError(EntroflowError, ValueError):
    """A field has negative (or, where required, zero) cells."""


class ZeroFieldError(EntroflowError, ValueError):
    pass


class SupportEscapesBox(EntroflowError, ValueError):
    pass


class DegenerateWindow(EntroflowError, ValueError):
    """A fitting window is too short or contains nonpositive samples."""


class SampleTimeOutOfRange(EntroflowError, ValueError):
    pass


class BracketFailure(EntroflowError, RuntimeError):
    """The normalizer bracket does not straddle the target mass."""


class ConnectorInfeasible(EntroflowError, RuntimeError):
    """The desingularizing connector cannot be made nonnegative for this epsilon."""


class CflViolation(EntroflowError, RuntimeError):
    pass


class NegativeCellError(EntroflowError, RuntimeError):
    pass
