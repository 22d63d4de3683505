"""Exception types shared across the package.

Everything that signals bad *input data* derives from :class:`DataError`, so the
command line can map it to a single exit code.
"""


class DataError(ValueError):
    """Input data is malformed or violates a precondition."""


class ParseError(DataError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class AnnotationRangeError(DataError):
    pass


class SegmentTooShortError(DataError):
    pass


class ModelFormatError(DataError):
    """A model artifact file is corrupt, truncated or of an unsupported version."""


class NotCalibratedError(RuntimeError):
    pass
