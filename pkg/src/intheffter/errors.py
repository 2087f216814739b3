"""Exception hierarchy shared by the builders, the composition layer and the CLI."""

from __future__ import annotations


class HeffterError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameters(HeffterError, ValueError):
    """Parameters violate a precondition or a necessary condition."""


class ExternalConstruction(HeffterError):
    """The requested object exists, but only through a construction not implemented here."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class OpenCase(HeffterError):
    """No construction is known for the requested parameters."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class ConstructionError(HeffterError):
    """A builder's self-check failed. This always indicates a bug."""


class InfeasiblePartition(HeffterError):
    """A support set could not be cut into the requested pieces."""
