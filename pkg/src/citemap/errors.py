"""Exception and warning types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, ParseError and
ConsistencyError -> 3, ProviderError (and subclasses) -> 4.
"""


class CitemapError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CitemapError):
    """Invalid parameters, word-list files, or pipeline configuration."""


class ParseError(CitemapError):
    """A local input file could not be parsed."""


class ConsistencyError(CitemapError):
    """Structures passed together do not describe the same data."""


class ProviderError(CitemapError):
    """A remote catalog could not be used."""


class TransportError(ProviderError):
    """Network-level failure; safe to retry."""


class ResponseError(ProviderError):
    """The provider answered, but the payload was unusable."""


class StageError(CitemapError):
    """A pipeline stage failed; wraps the causing error."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class CitemapWarning(UserWarning):
    """Non-fatal data quality issue (duplicates, dangling links, isolates)."""
