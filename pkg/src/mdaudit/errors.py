"""Exception hierarchy.

Everything raised on bad input derives from :class:`DataError`, which the
command line maps to exit status 3. Failures of an external model map to
status 4.
"""


class AuditError(Exception):
    """Base class for all errors raised by mdaudit."""


class DataError(AuditError, ValueError):
    """Invalid or unusable input data."""


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class DegenerateGeometryError(DataError):
    pass


class InterventionInfeasibleError(DataError):
    def __init__(self, message, marker=None, sample=None):
        self.marker = marker
        self.sample = sample
        super().__init__(message)


class DegenerateCorrelationError(DataError):
    pass


class DegenerateFitError(DataError):
    pass


class UndefinedScoreError(DataError):
    pass


class ModelInvocationError(AuditError):
    def __init__(self, message, stdout="", stderr=""):
        self.stdout = stdout
        self.stderr = stderr
        super().__init__(message)
