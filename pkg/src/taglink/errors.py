class TaglinkError(Exception):
    """Base class for errors raised by this package."""


class DataError(TaglinkError):
    """Malformed or inconsistent input data (files, names, configs)."""


class NumericalError(TaglinkError):
    """Non-finite values showed up where finite ones are required."""
