"""Exception taxonomy.

InvariantViolation is special: it means a machine-checked consequence of the
theory failed on a concrete instance, which is the highest-severity outcome
this toolkit can produce. The CLI maps it to its own exit code.
"""


class ScArraysError(Exception):
    pass


class ParseError(ScArraysError):
    pass


class EmptyRelator(ScArraysError):
    pass


class NotSymmetrized(ScArraysError):
    pass


class NotReduced(ScArraysError):
    pass


class ResourceLimit(ScArraysError):
    pass


class OutOfRegion(ScArraysError):
    pass


class Skipped(ScArraysError):
    """The region/certificate does not cover the query. Not a failure."""


class NotNormalForm(ScArraysError):
    pass


class ValencyExceeded(ScArraysError):
    pass


class NotSmallCancellation(ScArraysError):
    pass


class InvariantViolation(ScArraysError):
    """A runtime-checked oracle (a proved statement) failed on an instance."""
