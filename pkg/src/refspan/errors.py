"""Common exception base for the refspan package.

Every module defines its own exception types next to the code that raises
them; they all inherit from RefspanError so callers can catch package
failures with a single except clause. ConfigError marks bad user input
(config strings, missing files, invalid parameters) and maps to exit code
2 in the CLI, while other RefspanErrors map to exit code 1.
"""


class RefspanError(Exception):
    """Base class for all errors raised by refspan."""


class ConfigError(RefspanError):
    """User-supplied configuration or input is invalid."""


class ModelFormatError(RefspanError):
    """A persisted model file has a wrong magic, version, or layout."""
