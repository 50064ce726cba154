"""
Config-driven experiments.
"""

from bikt.experiments.config import RunConfig, RunMode
from bikt.experiments.runner import ExperimentRunner, RunSummary, SeedResult, run_seed
from bikt.experiments.validator import ConfigValidator, ValidationIssue, ValidationResult

__all__ = [
    "ConfigValidator",
    "ExperimentRunner",
    "RunConfig",
    "RunMode",
    "RunSummary",
    "SeedResult",
    "ValidationIssue",
    "ValidationResult",
    "run_seed",
]
