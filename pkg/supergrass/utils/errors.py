"""Exception hierarchy shared by the services and the command line."""


class SupergrassError(Exception):
    """Base class for every error raised on purpose by this package"""

    exit_code = 1


class InvalidInputError(SupergrassError, ValueError):
    """Malformed partition, spec, polynomial or matrix"""

    exit_code = 2


class VerificationError(SupergrassError, RuntimeError):
    """A cross-check that holds by theorem failed; indicates a bug"""

    exit_code = 3


class ResourceLimitError(SupergrassError, RuntimeError):
    """A computation would exceed the configured desk-scale limits"""

    exit_code = 4
