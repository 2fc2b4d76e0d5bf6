"""Exception and warning types shared across the package."""


class JointMeasError(Exception):
    """Base class for all errors raised by :mod:`jointmeas`."""


class DimensionError(JointMeasError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class InvalidParameter(JointMeasError, ValueError):
    """A numeric parameter lies outside the range an operation accepts."""


class FitError(JointMeasError, ValueError):
    """A marginal cannot be written as a classical smearing of an ideal POVM."""


class SingularMatrixError(JointMeasError, ValueError):
    """A nonideality matrix is not invertible within tolerance."""


class CutoffError(JointMeasError, ValueError):
    """The Fock cutoff is too small for the requested state."""


class GridError(JointMeasError, ValueError):
    """A sampling grid is too coarse, too narrow, or too sparse."""


class AccuracyWarning(UserWarning):
    """Result computed, but a numerical accuracy criterion is not met."""
