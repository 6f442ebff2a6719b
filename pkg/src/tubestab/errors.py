"""Typed failure modes shared across the package."""
from __future__ import annotations


class TubestabError(Exception):
    """Base class for every recoverable error raised by tubestab."""


class NonFinite(TubestabError, ValueError):
    pass


class NotHermitian(TubestabError):
    pass


class NoConvergence(TubestabError):
    pass


class SingularPencil(TubestabError):
    pass


class SingularBlock(TubestabError):
    pass


class DegreeTooSmall(TubestabError, ValueError):
    pass


class DuplicateNodes(TubestabError, ValueError):
    pass


class ZeroPolynomial(TubestabError, ValueError):
    pass


class NotRealCoefficient(TubestabError, ValueError):
    pass


class PoleAtOne(TubestabError):
    pass


class PatternViolation(TubestabError):
    pass


class NotContraction(TubestabError, ValueError):
    pass


class SplitFailure(TubestabError):
    pass


class GridTooLarge(TubestabError, ValueError):
    pass


class WeightPole(TubestabError):
    pass


class SchemaError(TubestabError, ValueError):
    pass


class DimMismatch(TubestabError, ValueError):
    pass


class Pole(TubestabError, ZeroDivisionError):
    pass


class NotInvertible(TubestabError, ZeroDivisionError):
    pass


class NotSymmetric(TubestabError, ValueError):
    pass


class NotSkew(TubestabError, ValueError):
    pass


class NormalizationFailure(TubestabError):
    pass


class UnknownSuite(TubestabError, KeyError):
    pass
