"""Exception types raised across the package."""


class PairqcError(Exception):
    """Base class for package errors."""


class EmptySectorError(PairqcError, ValueError):
    """A projection targeted a pair-number sector with no weight."""


class ConvergenceError(PairqcError, RuntimeError):
    """An iterative procedure stopped before meeting its tolerance."""


class OracleGuardError(PairqcError, ValueError):
    """An exact-diagonalization request exceeded the size guard."""


class ConfigError(PairqcError, ValueError):
    """Experiment configuration failed validation."""
