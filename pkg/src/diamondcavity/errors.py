"""Exception types shared across the package.

Two families matter to callers: ``ValidationError`` for malformed inputs,
stacks, configs, or data files (the CLI maps these to exit code 2), and
``AnalysisError`` for analyses that ran but failed, e.g. a fit that did not
converge (CLI exit code 1).
"""


class ValidationError(ValueError):
    """Invalid input: bad stack, bad geometry, malformed file, bad units."""


class StackError(ValidationError):
    """Layer stack violates its structural invariants."""


class StabilityError(ValidationError):
    """Cavity geometry outside the stable-resonator region."""


class AnalysisError(RuntimeError):
    """An analysis ran on valid input but could not produce a result."""


class FitConvergenceError(AnalysisError):
    """Least-squares fit failed to converge within the iteration budget."""
