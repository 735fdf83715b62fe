"""Exception hierarchy shared by all lorcut modules."""


class LorcutError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = dict(context)

    def as_json(self):
        return {"error": {"code": self.code, "message": self.message, "context": self.context}}


class StructuralError(LorcutError):
    """Malformed value: wrong shape, asymmetry, mixed scalar kinds, length mismatch."""

    code = "structural"


class DomainError(LorcutError):
    """Input outside an operation's mathematical domain."""

    code = "domain"


class CapabilityError(LorcutError):
    """Request outside the supported size/feature range."""

    code = "capability"


class ResourceLimitError(LorcutError):
    """Configured resource limit exceeded; context carries progress state."""

    code = "resource_limit"


class InvariantViolation(LorcutError):
    """A certified mathematical invariant failed; indicates a bug or a false claim."""

    code = "invariant"
