"""Exception types shared across the package."""


class DatasetError(ValueError):
    """A dataset file is missing, malformed, or inconsistent with its header.

    ``line`` is the 1-based line number in the file (the header is line 1),
    or None when the error is not tied to a specific line.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelError(ValueError):
    """A model file cannot be parsed or describes an invalid network."""


class QueryError(ValueError):
    """A query or evidence string does not match the accepted grammar."""
