"""Exception hierarchy shared across the package."""

from __future__ import annotations


class GrowthOptError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameters(GrowthOptError, ValueError):
    """One or more parameter invariants are violated.

    ``violations`` lists every violated invariant, not just the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class OutOfRange(InvalidParameters):
    """A scalar argument lies outside its admissible range."""


class FellerViolation(InvalidParameters):
    """A square-root variance process fails 2*kappa*gamma_level > delta**2."""


class BadDensity(InvalidParameters):
    """A user-supplied jump density fails normalization or positivity."""


class PoleAtB(GrowthOptError, ValueError):
    """Kummer M(a, b, z) evaluated at a pole (b a nonpositive integer)."""


class DomainExceeded(GrowthOptError, ValueError):
    """Argument outside the supported accuracy domain of a special function."""


class QuadratureFailure(GrowthOptError, RuntimeError):
    """Adaptive quadrature could not meet its tolerance within budget."""


class InternalInvariantViolation(GrowthOptError, RuntimeError):
    """An identity that must hold for valid inputs failed; indicates a bug."""


class StepSizeTooLarge(GrowthOptError, RuntimeError):
    """ODE step produced a jump incompatible with a stable integration."""


class DegenerateVariance(GrowthOptError, RuntimeError):
    """All simulated paths are identical although randomness was expected."""


class NonFinitePath(GrowthOptError, RuntimeError):
    """A simulated path overflowed or produced a non-finite value."""

    def __init__(self, message, path_index=None, seed=None):
        self.path_index = path_index
        self.seed = seed
        super().__init__(message)


class ConfigError(GrowthOptError, ValueError):
    """Base class for run-configuration parsing errors."""


class UnknownKey(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class DuplicateKey(ConfigError):
    pass


class DuplicateUtility(DuplicateKey):
    """Both utility.theta and utility.gamma_rra were supplied."""
