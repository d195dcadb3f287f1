"""Exception hierarchy shared by the simulator, the tag format and the analysis."""


class AntibunchError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(AntibunchError, ValueError):
    pass


class PreconditionError(AntibunchError, ValueError):
    """An input stream violates the contract of the operation (e.g. unsorted)."""


class DataError(AntibunchError):
    """Malformed data found while streaming; ``offset`` is the record index."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (record {offset})"
        super().__init__(message)
        self.offset = offset


class FormatError(AntibunchError):
    """File header does not describe a PTAG file we can read."""


class CorruptionError(DataError):
    """File ends inside a record."""


class InsufficientData(AntibunchError):
    pass


class ConfigError(AntibunchError):
    def __init__(self, message, key=None):
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key
