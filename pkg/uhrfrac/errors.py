# -*- coding: utf-8 -*-
"""Exceptions raised by uhrfrac.

Every error derives from UHRFracError so callers (the command line in
particular) can catch the whole family at once.

"""

__all__ = (
    'UHRFracError',
    'DomainError',
    'SingularityError',
    'ConvergenceError',
    'NodeAlignmentError',
    'MeshMismatchError',
    'OrderingError',
    'ParseError',
    'EvaluationError',
    'DivideByZeroError',
    'ConfigError',
    'UnknownScenarioError',
    'ContractionError'
)


class UHRFracError(Exception):
    pass


class DomainError(UHRFracError, ValueError):
    """An argument lies outside the natural domain of a function."""


class SingularityError(DomainError):
    """A weakly singular kernel or weight was point-evaluated at its pole."""


class ConvergenceError(UHRFracError):
    pass


class NodeAlignmentError(UHRFracError, ValueError):
    pass


class MeshMismatchError(UHRFracError, ValueError):
    pass


class OrderingError(UHRFracError, ValueError):
    """The impulse partition violates 0 < t1 <= s1 <= t2 < ... <= sm <= T."""


class ParseError(UHRFracError):

    def __init__(self, position, message):
        UHRFracError.__init__(self, "%s at offset %i" % (message, position))
        self.position = position
        self.message = message


class EvaluationError(UHRFracError):

    def __init__(self, position, message):
        UHRFracError.__init__(self, "%s at offset %i" % (message, position))
        self.position = position
        self.message = message


class DivideByZeroError(EvaluationError, ZeroDivisionError):
    pass


class ConfigError(UHRFracError):

    def __init__(self, message, key=None, missing=()):
        if key is not None:
            message = "%s: %s" % (key, message)
        UHRFracError.__init__(self, message)
        self.key = key
        self.missing = tuple(missing)


class UnknownScenarioError(UHRFracError, KeyError):

    def __str__(self):
        return Exception.__str__(self)


class ContractionError(UHRFracError):
    """The contraction constant is not below 1."""
