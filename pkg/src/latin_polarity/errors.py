"""Shared exception types.

Everything raised for malformed *input data* (files, fixtures, responses)
derives from DataError so the CLI can map it to a single exit code.
Contract violations in code (bad arguments, broken invariants) raise plain
ValueError and are not caught.
"""


class DataError(Exception):
    """A problem with user-supplied data or files."""


class ParseError(DataError):
    """Malformed content in a structured input file.

    Carries optional path/line context; the message always names the line
    number when one is known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class ConfigError(DataError):
    """Invalid or incomplete runtime configuration (paths, env vars)."""
