"""Exception and warning types shared across the package."""


class SpecpolError(Exception):
    """Base class for all library errors."""


class DomainError(SpecpolError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedMap(SpecpolError):
    """The requested operation is not defined for this map kind."""


class ConvergenceError(SpecpolError):
    """An iterative solver failed to converge within its iteration budget."""


class SingularGram(SpecpolError):
    """The mass matrix G is singular or numerically indefinite."""


class NotPositiveDefinite(SpecpolError):
    """Cholesky factorization of a Gram matrix failed even after jitter."""


class BandTooSmall(SpecpolError):
    """Fourier-coefficient band truncation loses too much energy."""


class EigFailure(SpecpolError):
    """A dense eigenvalue solve failed."""


class EmptySet(SpecpolError):
    """A set operation received or produced an empty set."""


class ParseError(SpecpolError):
    """Trajectory file could not be parsed; carries row/column location."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)


class TooFewSamples(SpecpolError):
    """Not enough samples remain after subsampling to form snapshot pairs."""


class ConfigError(SpecpolError):
    """Experiment configuration is invalid; message names the offending field."""


class RankWarning(UserWarning):
    """Numerical rank of a data matrix is below min(M, N)."""


class RankDeficiencyWarning(UserWarning):
    """Requested compression rank exceeds the effective rank of the Gram."""
