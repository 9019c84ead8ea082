"""Exceptions raised by the t-design noise toolkit.

Every error is also a ``ValueError`` so numeric callers can catch the builtin.
"""


class TDesignError(ValueError):
    """Base class for all domain errors"""


class DimensionMismatch(TDesignError):
    """Operands have incompatible shapes"""


class ResourceLimitExceeded(TDesignError):
    """A tensor power would exceed the dimension guard"""


class NotHermitian(TDesignError):
    """Input expected to be Hermitian is not"""


class InvalidParameter(TDesignError):
    """A scalar parameter lies outside its admissible range"""


class InvalidDensityMatrix(TDesignError):
    """Input is not a valid single-qubit density matrix"""


class InvalidBlochPoint(TDesignError):
    """Point lies outside the closed Bloch ball"""


class InvalidEnsemble(TDesignError):
    """Ensemble weights or unitaries violate their invariants"""


class InsufficientDesignOrder(TDesignError):
    """Ensemble is not certified up to the requested order"""


class UnsupportedOrder(TDesignError):
    """Requested moment order is outside the supported range"""


class TraceMismatch(TDesignError):
    """Moment operators compared by min_epsilon have different traces"""


class EmptySample(TDesignError):
    """A state sample contains no states"""


class OracleUnavailable(TDesignError):
    """Haar integration oracle is disabled by configuration"""
