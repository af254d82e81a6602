"""Exception hierarchy.

Every error raised by the library derives from :class:`BlaschkeError` so
callers (the CLI in particular) can map them to exit codes.
"""


class BlaschkeError(Exception):
    """Base class for all library errors."""


class DomainError(BlaschkeError, ValueError):
    """An argument lies outside the mathematical domain of an operation
    (a zero on or outside the unit circle, a degree-0 polynomial, ...)."""


class UsageError(BlaschkeError, ValueError):
    """Arguments are individually valid but do not fit together, e.g. an
    inner product between vectors of different spaces."""


class NumericalFailure(BlaschkeError, ArithmeticError):
    """A computed quantity failed its own consistency check.

    Typically a tolerance broke down: a root count did not match, a
    residual exceeded its bound, or singular values fell in the ambiguous
    band.
    """


class InternalConsistencyError(BlaschkeError, AssertionError):
    """Two independent routes disagree (e.g. the classifier emitted a
    subspace that the residual test rejects)."""
