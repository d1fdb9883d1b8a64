"""Runtime settings read from ``SLLG_*`` environment variables and ``.env``."""

import os
from functools import lru_cache
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level knobs.

    None of these change numerical output; run parameters belong to
    :class:`src.models.config.SimConfig`.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SLLG_",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO", description="Logging level"
    )
    log_format: Literal["json", "text"] = Field(
        default="json", description="'json' for structured logs, 'text' for humans"
    )
    enable_metrics: bool = Field(default=True, description="Collect run metrics")

    output_dir: str = Field(default="runs", description="Parent of per-subcommand run directories")
    workers: int = Field(
        default=1, ge=0, le=256, description="Ensemble threads; 0 means one per CPU"
    )
    min_ensemble: int = Field(
        default=100, ge=2, description="Smallest ensemble accepted by statistical verdicts"
    )

    @field_validator("workers")
    @classmethod
    def expand_auto_workers(cls, value: int) -> int:
        return value or os.cpu_count() or 1


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
