class ConfigurationError(ValueError):
    """Raised for invalid simulation or experiment parameters."""


class InvalidCoverError(ValueError):
    """Raised when a redundancy check is asked about a set that is not a k-cover."""


class TraceParseError(ValueError):
    """A trace CSV did not match the expected schema."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
