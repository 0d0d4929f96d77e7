"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates an operation's precondition."""


class NotDecodableError(ValueError):
    """The linear system for a chunk does not have full row rank."""


class IntegrityError(RuntimeError):
    """Received data is inconsistent with the coefficient vectors."""


class GenerationError(RuntimeError):
    """Random graph generation gave up after its retry cap."""


class InvariantViolation(AssertionError):
    """A numerical invariant that the analysis relies on has been broken."""


class ParseError(ValueError):
    """Malformed text input; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
