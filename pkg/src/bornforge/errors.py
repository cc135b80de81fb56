"""Exception types raised across the package.

Everything here is a ValueError subclass (bad inputs) except
IndexOutOfRange, which is an IndexError so that idiomatic `except
IndexError` handling still works.
"""


class BornforgeError(Exception):
    """Base class for package-specific failures."""


class NegativeComponent(BornforgeError, ValueError):
    """A probability vector entry is below -eps."""


class NotNormalized(BornforgeError, ValueError):
    """A state vector's norm or sum is outside the validation tolerance."""


class ZeroVector(BornforgeError, ValueError):
    """An amplitude vector with (numerically) zero norm."""


class DimensionMismatch(BornforgeError, ValueError):
    """Operands have incompatible dimensions."""


class KindMismatch(BornforgeError, ValueError):
    """Mixed real-simplex and complex-sphere operands."""


class NotUnitary(BornforgeError, ValueError):
    """Matrix fails the U^dagger U = I check."""


class NotOrthonormal(BornforgeError, ValueError):
    """Frame vectors fail the pairwise orthonormality check."""


class AllRatiosZero(BornforgeError, ValueError):
    """Every likelihood ratio vanished; inputs cannot be valid states."""


class IndexOutOfRange(BornforgeError, IndexError):
    """Outcome or component index outside 0..n-1."""


class InvalidBarycentric(BornforgeError, ValueError):
    """Barycentric weights not strictly positive or not summing to one."""


class DegenerateSimplex(BornforgeError, ValueError):
    """Simplex volume determinant underflowed the relative tolerance."""


class InsufficientSamples(BornforgeError, ValueError):
    """Too few samples for the requested number of bins."""


class SingularMap(BornforgeError, ValueError):
    """Linear map is singular (or not positive where required)."""


class RejectionExhausted(BornforgeError, RuntimeError):
    """Rejection sampler exceeded the consecutive-rejection budget."""


class InvalidAlpha(BornforgeError, ValueError):
    """Hypothesis-mass vectors inconsistent or alpha outside (0, 1)."""


class InvalidCount(BornforgeError, ValueError):
    """Counts violate 0 <= successes <= total, total >= 1."""


class ZeroExpected(BornforgeError, ValueError):
    """Chi-square expected counts must all be positive."""


class EmptySample(BornforgeError, ValueError):
    """Statistic requested on an empty sample."""


class PreconditionViolated(BornforgeError, ValueError):
    """Experiment called with arguments outside its documented domain."""


class ConfigError(BornforgeError, ValueError):
    """Experiment or suite configuration could not be interpreted."""
