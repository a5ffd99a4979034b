"""Exception hierarchy shared by all pipeline stages.

Each class maps to a CLI exit code so stage failures are scriptable.
"""


class HubofsError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(HubofsError):
    """A parameter value is outside its documented range."""

    exit_code = 2


class DataError(HubofsError):
    """The input data (file, table, or artifact) is unusable."""

    exit_code = 3


class CapabilityError(HubofsError):
    """The request exceeds a hard size bound of the chosen method."""

    exit_code = 4
