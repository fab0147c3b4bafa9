"""Exception types shared across the package.

The CLI maps these onto exit codes: parameter/domain problems exit 1,
resource exhaustion (enumeration budgets, rejection limits) exits 2.
"""


class HypertreesError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(HypertreesError, ValueError):
    """A model parameter is outside its legal range (r < 2, s < 2, n < 1, ...)."""


class DivisibilityError(ParameterError):
    """A required divisibility condition on (r, s, n) does not hold."""


class DomainError(HypertreesError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class DegenerateParametersError(DomainError):
    """The requested quantity is undefined at these parameters, e.g. (r, s) = (2, 2)."""


class IntegralityError(HypertreesError, ArithmeticError):
    """An expression that must be a nonnegative integer failed to be one.

    Raised instead of silently rounding: every factorial argument in the
    exact counting formulas is provably integral on the admissible lattice,
    so a violation means the inputs (or the code) are wrong.
    """


class BudgetExceededError(HypertreesError, RuntimeError):
    """An exhaustive enumeration would exceed the configured work budget."""


class RejectionLimitError(HypertreesError, RuntimeError):
    """A rejection sampler gave up after the configured number of attempts."""


class BoundaryDominatesError(HypertreesError, ArithmeticError):
    """The interior stationary point does not dominate the boundary value.

    Signals the subcritical regime, where the variational problem is won by
    the boundary corner rather than the interior stationary point.
    """
