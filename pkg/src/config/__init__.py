"""Configuration management for SLLG."""

from .settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]
