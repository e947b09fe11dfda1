"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, PreconditionError
(including validity-radius violations) -> 3, anything else raised by a task
(e.g. NonConvergenceError) -> 4.
"""


class PercLabError(Exception):
    """Base class for all errors raised by perclab."""


class ConfigError(PercLabError):
    """Malformed experiment spec or config file."""


class PreconditionError(PercLabError):
    """An operation's stated precondition was violated."""


class ValidityRadiusError(PreconditionError):
    """The requested computation would be contaminated by the finite
    boundary of a stand-in graph (interior validity radius exceeded)."""


class NonConvergenceError(PercLabError):
    """Iterative solve hit its iteration cap.

    Carries the last Rayleigh-quotient bracket as (low, high).
    """

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket
