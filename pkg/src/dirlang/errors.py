"""Shared error types."""


class ParseError(ValueError):
    """Malformed input text (automata, grammars, representations)."""


class ResourceCapExceeded(RuntimeError):
    """A configured enumeration/expansion/state cap was exceeded."""
