"""Exception hierarchy shared by every module; maps onto CLI exit codes."""


class LabError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2


class InvalidArgumentError(LabError, ValueError):
    """A caller-supplied argument is malformed or out of its allowed range."""

    exit_code = 1


class PreconditionError(LabError):
    """Inputs are well-formed but violate a documented precondition."""

    exit_code = 2


class DegenerateParametersError(PreconditionError):
    """A parameter combination collapses the construction (e.g. W >= N)."""


class EmptySelectionError(PreconditionError):
    """A selection step found nothing to select from."""


class ResourceLimitError(LabError):
    """The request exceeds a configured memory or search budget."""

    exit_code = 3
