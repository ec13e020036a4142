"""Exception hierarchy.

Every error raised on purpose by the package derives from ``CalibrationError``.
``NumericalFailure`` subclasses mark internal numerical breakdowns (the CLI maps
them to exit code 2); everything else is a user or data problem (exit code 1).
"""


class CalibrationError(Exception):
    pass


class InvalidValue(CalibrationError, ValueError):
    """A field violates a type invariant (non-finite entry, bad shape, ...)."""


class DatasetTooSmall(CalibrationError):
    pass


class RankDeficientData(CalibrationError):
    """The excitation does not determine the unregularized solution."""


class NegativeLambda(CalibrationError, ValueError):
    pass


class SingularMatrix(CalibrationError):
    pass


class SingularTruthMatrix(SingularMatrix):
    pass


class EmptyTrajectory(CalibrationError):
    pass


class InsufficientExcitation(CalibrationError):
    """Raw data is not close to a 3-dim affine subspace (motion or contact)."""


class EllipsoidFitFailed(CalibrationError):
    pass


class DegenerateBaseline(CalibrationError):
    """Workbench residual is (numerically) zero on some axis."""


class NoCandidates(CalibrationError):
    pass


class ConfigError(CalibrationError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class FileFormatError(CalibrationError):
    pass


class NumericalFailure(CalibrationError):
    """Internal numerical breakdown, e.g. a non-positive Cholesky pivot."""
