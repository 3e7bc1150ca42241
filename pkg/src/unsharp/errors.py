"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for inputs that
violate a precondition, and :class:`NumericalError` for numerical failures
such as a PSD violation or a zero-probability branch.  The CLI maps them to
exit codes 1 and 2.
"""


class UnsharpError(Exception):
    """Base class for all package errors."""


class ValidationError(UnsharpError, ValueError):
    """An input violates a documented precondition."""


class DimensionMismatch(ValidationError):
    pass


class NotHermitianError(ValidationError):
    def __init__(self, deviation, tol):
        self.deviation = float(deviation)
        self.tol = float(tol)
        super().__init__(
            f"operator is not Hermitian: max|A - A^H| = {self.deviation:.3e} > {self.tol:.1e}"
        )


class NumericalError(UnsharpError, ArithmeticError):
    """A computation produced a result outside its admissible range."""


class NotPositiveError(NumericalError):
    def __init__(self, min_eigenvalue, tol, what="operator"):
        self.min_eigenvalue = float(min_eigenvalue)
        self.tol = float(tol)
        super().__init__(
            f"{what} is not positive semidefinite: min eigenvalue {self.min_eigenvalue:.3e} < -{self.tol:.1e}"
        )


class ZeroProbability(NumericalError):
    """The requested outcome has probability below the normalisation threshold."""

    def __init__(self, probability, outcome=None):
        self.probability = float(probability)
        self.outcome = outcome
        label = "" if outcome is None else f" {outcome!r}"
        super().__init__(f"outcome{label} has probability {self.probability:.3e}; cannot normalise")


class RemainderNotPositive(NumericalError):
    """A phase-space grid overshoots the identity, so no remainder effect exists."""

    def __init__(self, deficit):
        self.deficit = float(deficit)
        super().__init__(
            f"cell effects exceed the identity by {self.deficit:.3e}; grid too coarse for this truncation"
        )
