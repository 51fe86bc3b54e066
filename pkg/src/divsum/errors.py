"""Shared exception types.

ValueError is reserved for bad arguments (domain/precondition violations).
ComputationError covers failures of the computation itself, which the CLI
reports with a distinct exit code.
"""


class ComputationError(Exception):
    """A computation could not be completed to the required guarantee."""


class UndecidableFloorError(ComputationError):
    """An interval for x/n^c still straddles an integer at the precision cap."""


class ResourceLimitError(ComputationError):
    """A size or iteration limit was exceeded before the target was met."""
