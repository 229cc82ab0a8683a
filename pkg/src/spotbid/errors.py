"""Exception hierarchy shared across the toolkit.

The command-line layer maps these onto exit codes: configuration problems
(UsageError) exit 1, bad or incompatible input data (DataError) exit 2, and
anything else is treated as an internal error and exits 3.
"""
from __future__ import annotations


class SpotBidError(Exception):
    """Base class for all toolkit errors."""


class UsageError(SpotBidError):
    """Invalid configuration: bad flag values or inconsistent options."""


class DataError(SpotBidError):
    """Invalid input data: malformed files, failed validation, or a trace
    that is incompatible with the configured price band."""
