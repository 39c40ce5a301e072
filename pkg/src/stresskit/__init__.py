"""Stress detection and analysis toolkit for social-media text corpora."""

__version__ = "0.1.0"

from .errors import StressKitError  # noqa: F401
