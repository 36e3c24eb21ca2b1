"""Shared exception types, mapped to CLI exit codes by wudlab.cli."""


class InvalidConfigError(ValueError):
    """Bad user input: malformed config, unknown keys, invalid flag values."""


class GuardExceededError(ValueError):
    """A brute-force or tabulation guard would be exceeded."""


class ConsistencyError(AssertionError):
    """An exact internal invariant was violated (always a bug or bad data)."""
