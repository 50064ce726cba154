"""
Validation of experiment configuration files.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError as PydanticValidationError

from bikt.core.models.layers import PropagationKind
from bikt.experiments.config import RunConfig, RunMode


@dataclass
class ValidationIssue:
    """Represents a validation problem."""
    field: str
    message: str
    severity: str = "error"  # error, warning

    def __str__(self) -> str:
        return f"{self.field}: {self.message}" if self.field else self.message


@dataclass
class ValidationResult:
    """Result of validation."""
    is_valid: bool
    errors: List[ValidationIssue]
    warnings: List[ValidationIssue] = field(default_factory=list)
    config: Optional[RunConfig] = None

    def has_errors(self) -> bool:
        """Check if there are any errors."""
        return len(self.errors) > 0

    def has_warnings(self) -> bool:
        """Check if there are any warnings."""
        return len(self.warnings) > 0


class ConfigValidator:
    """
    Validates run configurations: schema first, then cross-field rules.
    """

    def validate_file(self, path: Union[str, Path]) -> ValidationResult:
        """
        Validate a JSON configuration file.

        Args:
            path: Path of the configuration

        Returns:
            ValidationResult; ``config`` is set when the file is valid
        """
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
        except FileNotFoundError:
            return self._failed("", f"configuration file not found: {path}")
        except json.JSONDecodeError as exc:
            return self._failed("", f"invalid JSON at line {exc.lineno}: {exc.msg}")
        return self.validate_data(data, base_dir=path.parent)

    def validate_data(
        self, data: Any, base_dir: Optional[Union[str, Path]] = None
    ) -> ValidationResult:
        if not isinstance(data, dict):
            return self._failed("", "configuration must be a JSON object")
        try:
            config = RunConfig.model_validate(data)
        except PydanticValidationError as exc:
            errors = [
                ValidationIssue(
                    field=".".join(str(part) for part in error["loc"]),
                    message=error["msg"],
                )
                for error in exc.errors()
            ]
            return ValidationResult(is_valid=False, errors=errors)

        errors, warnings = self._cross_field(config, Path(base_dir) if base_dir else None)
        return ValidationResult(
            is_valid=not errors,
            errors=errors,
            warnings=warnings,
            config=config if not errors else None,
        )

    def _failed(self, field_name: str, message: str) -> ValidationResult:
        return ValidationResult(is_valid=False, errors=[ValidationIssue(field_name, message)])

    def _cross_field(self, config: RunConfig, base_dir: Optional[Path]):
        errors: List[ValidationIssue] = []
        warnings: List[ValidationIssue] = []

        dataset = config.dataset
        if dataset.uses_files and dataset.sbm is not None:
            errors.append(ValidationIssue("dataset", "give either dataset files or sbm, not both"))
        elif not dataset.uses_files and dataset.sbm is None:
            errors.append(ValidationIssue("dataset", "a dataset source (files or sbm) is required"))
        elif dataset.uses_files:
            for name in ("edges", "features", "labels"):
                errors.extend(self._check_path(f"dataset.{name}", getattr(dataset, name), base_dir))

        split = config.split
        if split.train_frac + split.val_frac >= 1:
            errors.append(ValidationIssue("split", "train_frac + val_frac must be below 1"))
        if split.inductive and not 0 < split.holdout_frac < 1:
            errors.append(ValidationIssue(
                "split.holdout_frac", "inductive splits need holdout_frac in (0, 1)"
            ))
        if split.splits_file is not None:
            errors.extend(self._check_path("split.splits_file", split.splits_file, base_dir))

        if config.model.propagation is PropagationKind.IDENTITY:
            errors.append(ValidationIssue(
                "model.propagation", "the host model needs 'gcn' or 'mean' propagation"
            ))

        if len(set(config.seeds)) != len(config.seeds):
            errors.append(ValidationIssue("seeds", "seeds must be unique"))

        if config.mode is not RunMode.BIKT and config.train.iterations:
            warnings.append(ValidationIssue(
                "train.iterations",
                f"ignored in '{config.mode.value}' mode",
                severity="warning",
            ))
        return errors, warnings

    def _check_path(
        self, field_name: str, path: Optional[Path], base_dir: Optional[Path]
    ) -> List[ValidationIssue]:
        if path is None:
            return [ValidationIssue(field_name, "path is required")]
        resolved = path if path.is_absolute() or base_dir is None else base_dir / path
        if not resolved.exists():
            return [ValidationIssue(field_name, f"file not found: {resolved}")]
        return []


def validate_config(path: Union[str, Path]) -> ValidationResult:
    """Convenience wrapper around ``ConfigValidator.validate_file``."""
    return ConfigValidator().validate_file(path)
