"""Exception types raised across the package."""

import numpy as np


class StrMORError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(StrMORError, ValueError):
    pass


class SingularTermPoint(StrMORError, ValueError):
    """A scalar term was evaluated on its branch cut or at a pole."""


class SingularK(StrMORError, np.linalg.LinAlgError):
    """The (structured) system matrix is numerically singular at a point."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class SingularPencil(StrMORError, np.linalg.LinAlgError):
    pass


class NotConjugationClosed(StrMORError, ValueError):
    pass


class DuplicatePoint(StrMORError, ValueError):
    pass


class OddSampleCount(StrMORError, ValueError):
    pass


class CoincidentPoints(StrMORError, ValueError):
    pass


class MissingDerivative(StrMORError, ValueError):
    pass


class NoFiniteEigenvalues(StrMORError, ValueError):
    pass


class ImaginaryAxisPole(StrMORError, ValueError):
    pass


class EmptySelection(StrMORError, RuntimeError):
    pass


class BadSectioning(StrMORError, ValueError):
    pass


class BadIOSpec(StrMORError, ValueError):
    pass


class ParseError(StrMORError, ValueError):
    pass
