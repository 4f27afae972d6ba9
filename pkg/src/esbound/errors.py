"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class ESBoundError(Exception):
    """Base class for all library errors."""


class PreconditionError(ESBoundError, ValueError):
    """An operation was called with arguments outside its contract."""


class BudgetExceeded(ESBoundError):
    """A configured resource budget (sieve size, search size, field size) was exceeded."""


class FactorizationError(ESBoundError):
    """Factorization stopped with a composite cofactor that could not be split."""

    def __init__(self, residue, partial=None):
        self.residue = residue
        self.partial = partial or []
        super().__init__(f"could not split composite residue {residue}")


class PrecisionExhausted(ESBoundError):
    """A certified comparison stayed indeterminate at the maximum precision."""


class VerificationFailed(ESBoundError):
    """A certified inequality came out false, or a check found a counterexample."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
