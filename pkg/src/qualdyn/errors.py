"""Exception hierarchy shared across the package.

Every error raised deliberately by qualdyn derives from QualdynError so
callers (and the CLI) can distinguish our diagnostics from genuine bugs.
"""


class QualdynError(Exception):
    """Base class for all qualdyn errors."""


class ConfigurationError(QualdynError):
    """Inconsistent wiring: mismatched group sets, bad scenario files, missing fields."""


class ParameterError(QualdynError, ValueError):
    """A numeric argument violates its contract (sigma <= 0, rate outside [0,1], ...)."""


class DomainError(QualdynError, ValueError):
    """An assessment parameter lies outside the feature model's parameter space."""


class UnsupportedModelError(QualdynError):
    """The operation requires a model property this instance lacks (e.g. strict monotonicity)."""


class AssumptionError(QualdynError):
    """A closed-form validator refused because its analytical assumptions do not hold."""


class PreconditionError(QualdynError):
    """A runtime precondition failed (input not a fixed point, dominance violated, ...)."""


class ParseError(QualdynError):
    """A data file failed validation; the message names the offending line."""


class DegenerateDataError(QualdynError):
    """Input data carries too little information to fit (mass in one bin, tiny totals)."""


class FitError(QualdynError):
    """An iterative fit failed to converge; diagnostics are in the message."""
