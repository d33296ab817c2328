"""
Exception types raised by the services
"""


class TightPovmError(Exception):
    """Base class for all library errors"""


class StructureError(TightPovmError, ValueError):
    """Party structure, subset or dimension mismatch"""


class PreconditionError(TightPovmError, ValueError):
    """An operation was called outside its precondition"""


class PovmLoadError(TightPovmError, ValueError):
    """A POVM document could not be parsed or validated"""

    def __init__(self, message: str, field: str = None, index: int = None):
        super().__init__(message)
        self.field = field
        self.index = index


class CatalogVerificationError(TightPovmError):
    """A catalog entry failed its own expected-quantity checks"""

    def __init__(self, name: str, failures: list):
        super().__init__(f"Catalog entry '{name}' failed verification: {'; '.join(failures)}")
        self.name = name
        self.failures = failures


class ReductionConsistencyError(TightPovmError):
    """A vector classified as separable has a mixed subset reduction"""
