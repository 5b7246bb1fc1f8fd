"""Exception types shared across the package.

The CLI maps each family to a process exit code: validation problems exit 1,
unreadable or malformed files exit 2, capacity and oracle limits exit 3.
"""


class ProbCoverError(Exception):
    exit_code = 1


class ValidationError(ProbCoverError, ValueError):
    """Bad argument or broken invariant on an input."""


class EmbeddingFormatError(ProbCoverError, ValueError):
    """An embedding file does not conform to its declared format."""

    exit_code = 2


class CapacityError(ProbCoverError, MemoryError):
    """A structure would exceed its configured size budget."""

    exit_code = 3


class OracleLimitError(CapacityError):
    """An exhaustive solver was asked for an instance beyond its limits."""
