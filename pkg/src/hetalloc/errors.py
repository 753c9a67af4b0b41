"""Exception types shared across the package."""


class HetallocError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HetallocError, ValueError):
    """Argument lies outside the mathematical domain of the function."""


class UnderflowError(HetallocError, ArithmeticError):
    """An intermediate quantity underflowed to zero in double precision."""


class InvalidRate(HetallocError, ValueError):
    """A code rate or row budget is outside its admissible range."""


class NoSolution(HetallocError, ArithmeticError):
    """The defining equation has no solution in the searched range."""


class ShiftMismatch(HetallocError, ValueError):
    """An operation requiring equal per-group shifts got unequal ones."""


class Infeasible(HetallocError, ValueError):
    """The allocation cannot recover the required number of rows."""


class ComplexityGuard(HetallocError, RuntimeError):
    """A brute-force verification request exceeds its resource cap."""


class InvalidCluster(HetallocError, ValueError):
    """Cluster validation found error-class violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"[{v.code}] {v.message}" for v in self.violations)
        super().__init__(f"invalid cluster: {lines}")


class ConfigError(HetallocError, ValueError):
    """An experiment configuration file is malformed."""
