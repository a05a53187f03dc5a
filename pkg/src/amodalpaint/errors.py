"""Exception types shared across the package.

The CLI maps these onto exit codes: ManifestError (and plain OSError)
exit 2, ValidationError and subclasses exit 3.
"""


class ValidationError(ValueError):
    """An argument violates an operation's precondition."""


class ShapeMismatchError(ValidationError):
    """Two grids that must share dimensions do not."""


class ManifestError(Exception):
    """A manifest or referenced file is missing, unreadable, or malformed."""


class GenerationError(RuntimeError):
    """Scene synthesis could not satisfy the requested parameters."""
