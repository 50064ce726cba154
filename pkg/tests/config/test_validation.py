"""
Unit tests for environment variable validation.
"""

import pytest
from config.settings import Settings


def test_validation_passes_with_defaults(monkeypatch):
    """Test that default settings validate."""
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    monkeypatch.delenv("LOG_FORMAT", raising=False)
    monkeypatch.delenv("BIKT_JOBS", raising=False)

    settings = Settings()

    settings.validate_critical_env_vars()


def test_validation_fails_with_unknown_log_level(monkeypatch):
    """Test that an unknown log level is rejected."""
    monkeypatch.setenv("LOG_LEVEL", "verbose")

    settings = Settings()

    with pytest.raises(ValueError, match="LOG_LEVEL is invalid: VERBOSE"):
        settings.validate_critical_env_vars()


def test_validation_fails_with_unknown_log_format(monkeypatch):
    """Test that only json and text formats are accepted."""
    monkeypatch.setenv("LOG_FORMAT", "xml")

    settings = Settings()

    with pytest.raises(ValueError, match="LOG_FORMAT is invalid"):
        settings.validate_critical_env_vars()


def test_validation_fails_with_zero_jobs(monkeypatch):
    """Test that BIKT_JOBS must be positive."""
    monkeypatch.setenv("BIKT_JOBS", "0")

    settings = Settings()

    with pytest.raises(ValueError, match="BIKT_JOBS is invalid"):
        settings.validate_critical_env_vars()


def test_validation_reports_every_issue(monkeypatch):
    """Test that all invalid settings are listed together."""
    monkeypatch.setenv("LOG_LEVEL", "loud")
    monkeypatch.setenv("LOG_FORMAT", "yaml")
    monkeypatch.setenv("BIKT_JOBS", "-1")

    settings = Settings()

    with pytest.raises(ValueError) as excinfo:
        settings.validate_critical_env_vars()

    message = str(excinfo.value)
    assert "LOG_LEVEL" in message
    assert "LOG_FORMAT" in message
    assert "BIKT_JOBS" in message
