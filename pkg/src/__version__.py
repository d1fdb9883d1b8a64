"""Version information for SLLG."""

__version__ = "0.1.0"

