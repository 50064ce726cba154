"""
Application settings and configuration.
"""

import logging
from pathlib import Path
from typing import List, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
VALID_LOG_FORMATS = ("json", "text")


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Logging
    log_level: str = Field(default="INFO", validation_alias="LOG_LEVEL")
    log_format: str = Field(default="text", validation_alias="LOG_FORMAT")
    log_file: Optional[Path] = Field(default=None, validation_alias="BIKT_LOG_FILE")

    # Experiments
    seed_override: Optional[int] = Field(default=None, validation_alias="BIKT_SEED_OVERRIDE")
    default_output_dir: Path = Field(default=Path("runs"), validation_alias="BIKT_OUTPUT_DIR")
    default_jobs: int = Field(default=1, validation_alias="BIKT_JOBS")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    @field_validator('log_level', mode='before')
    @classmethod
    def parse_log_level(cls, v):
        """Normalize log level casing."""
        return v.upper() if isinstance(v, str) else v

    @field_validator('seed_override', mode='before')
    @classmethod
    def parse_seed_override(cls, v):
        """Parse BIKT_SEED_OVERRIDE, ignoring values that are not integers."""
        if v is None or (isinstance(v, str) and not v.strip()):
            return None
        try:
            return int(v)
        except (ValueError, TypeError):
            logging.getLogger("bikt").warning(
                f"Ignoring BIKT_SEED_OVERRIDE={v!r}: not an integer"
            )
            return None

    def validate_critical_env_vars(self) -> None:
        """
        Validate settings that would break a run.

        Raises:
            ValueError: Listing every invalid setting
        """
        issues: List[str] = []

        if self.log_level not in VALID_LOG_LEVELS:
            issues.append(
                f"LOG_LEVEL is invalid: {self.log_level}. Expected one of {', '.join(VALID_LOG_LEVELS)}."
            )
        if self.log_format not in VALID_LOG_FORMATS:
            issues.append(
                f"LOG_FORMAT is invalid: {self.log_format}. Expected 'json' or 'text'."
            )
        if self.default_jobs < 1:
            issues.append(f"BIKT_JOBS is invalid: {self.default_jobs}. Must be at least 1.")

        if issues:
            error_msg = "Environment variable validation failed:\n" + "\n".join(f"  - {issue}" for issue in issues)
            raise ValueError(error_msg)


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get application settings, re-read from the current environment."""
    return Settings()
