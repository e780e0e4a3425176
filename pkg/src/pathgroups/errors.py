"""Exception types shared across the package."""


class PathgroupsError(Exception):
    """Base class for all library errors."""


class MalformedInputError(PathgroupsError):
    """An input file or record could not be parsed."""


class UnknownNodeError(PathgroupsError):
    """A node token appears in one input but not in the corpus universe."""


class UnassignedNodeError(PathgroupsError):
    """A counted node has no label in the partition."""


class ConstraintViolationError(PathgroupsError):
    """An observed transition is not permitted by the active constraint."""


class InfeasibleSearchError(PathgroupsError):
    """Exhaustive enumeration was refused because the partition count is too large."""

    def __init__(self, message, n_partitions=None):
        super().__init__(message)
        self.n_partitions = n_partitions
