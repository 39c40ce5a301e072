"""Exception and warning types shared across the package.

Concrete data errors subclass StressKitError so the CLI can map any of
them to a single "data error" exit code.
"""

from __future__ import annotations


class StressKitError(Exception):
    """Base class for all data and usage errors raised by this package."""


class FingerprintMismatchWarning(UserWarning):
    """Model was trained under a different preprocessing configuration."""
