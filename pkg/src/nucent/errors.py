"""Exception hierarchy shared by all modules."""


class NucentError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NucentError, ValueError):
    """Argument outside the domain of a function."""


class GridMismatchError(NucentError, ValueError):
    """Two fields sampled on different time grids were combined."""


class DegenerateDensityError(NucentError, ArithmeticError):
    """A probability density with zero total mass was requested."""


class UndefinedVisibilityError(NucentError, ArithmeticError):
    """Fringe contrast cannot be formed (flat or empty fringe)."""


class DegenerateStateError(NucentError, ArithmeticError):
    """Density matrix with zero trace."""


class InconsistentCountsError(NucentError, ValueError):
    """Inferred probabilities are not a valid distribution."""


class SingularDenominatorError(NucentError, ZeroDivisionError):
    """A closed-form expression hit its pole."""


class ConfigError(NucentError, ValueError):
    """Invalid configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
