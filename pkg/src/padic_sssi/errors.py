"""Exception types shared across the package."""

from __future__ import annotations


class PadicSssiError(Exception):
    """Base class for package-specific failures."""


class ConfigError(PadicSssiError):
    """An experiment configuration is malformed or inconsistent."""


class ResourceCapError(PadicSssiError):
    """A requested computation exceeds a configured memory or enumeration cap."""
