"""Exception types shared across the package."""

from __future__ import annotations


class XweakError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(XweakError):
    """Bad input: malformed file, inconsistent artifact, or invalid setting."""


class ComputeError(XweakError):
    """Numerical failure during pipeline execution (e.g. non-finite likelihood)."""
