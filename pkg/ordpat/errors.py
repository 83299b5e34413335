"""Exceptions raised by the ordpat modules.

All exceptions derive from OrdpatError, which stores the message in
``msg``. The command-line front end maps them to a nonzero exit code.
"""


class OrdpatError(Exception):
    exit_code = 1

    def __init__(self, msg):
        self.msg = msg

    def __str__(self):
        return str(self.msg)


class InvalidPattern(OrdpatError):
    pass


class DuplicateValues(OrdpatError):
    pass


class LengthMismatch(OrdpatError):
    pass


class CapExceeded(OrdpatError):
    pass


class AlphabetMismatch(OrdpatError):
    pass


class InvalidSequence(OrdpatError):
    pass


class PeriodicCollision(OrdpatError):
    pass


class DuplicateShifts(OrdpatError):
    pass


class HypothesisViolated(OrdpatError):
    pass


class LengthTooLong(OrdpatError):
    pass


class BadLength(OrdpatError):
    pass


class FamilyDiscrepancy(OrdpatError):
    pass


class UnknownName(OrdpatError):
    pass


class InvalidMap(OrdpatError):
    pass


class ExcludedPoint(OrdpatError):
    pass


class WindowTooLong(OrdpatError):
    pass


class BadSeries(OrdpatError):
    pass


class BadStochasticVector(OrdpatError):
    pass


class NonStationary(OrdpatError):
    pass


class DuplicatePoints(OrdpatError):
    pass


class InternalError(OrdpatError):
    """A postcondition that holds by construction was violated."""
    exit_code = 3
