"""Exception hierarchy for the tilesub package.

Every error raised by the library derives from TilesubError so callers can
catch one type.  The CLI maps subtypes onto process exit codes.
"""


class TilesubError(Exception):
    """Base class for all tilesub errors."""


class GeometryError(TilesubError):
    """Invalid geometric input: non-finite coords, bad winding, self-crossing."""


class RuleError(TilesubError):
    """A substitution rule failed structural or geometric validation."""


class ParseError(RuleError):
    """A rule or patch file could not be parsed."""


class CapExceededError(TilesubError):
    """A requested operation would produce more tiles than the configured cap."""

    def __init__(self, requested: int, cap: int):
        super().__init__(f"operation would produce {requested} tiles, exceeding cap {cap}")
        self.requested = requested
        self.cap = cap


class NotPrimitiveError(TilesubError):
    """The substitution matrix is not primitive, so frequency analysis is undefined."""


class UsageError(TilesubError):
    """Bad command-line usage (unknown flags, missing arguments)."""
