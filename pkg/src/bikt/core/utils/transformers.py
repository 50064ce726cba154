"""
Data transformation utilities.
"""

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np


def to_json_serializable(data: Any) -> Any:
    """
    Convert data to JSON-serializable format.

    numpy scalars and arrays become Python numbers and lists; NaN and infinities
    become None.
    """
    if isinstance(data, dict):
        return {str(k): to_json_serializable(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [to_json_serializable(item) for item in data]
    elif isinstance(data, np.ndarray):
        return to_json_serializable(data.tolist())
    elif isinstance(data, Enum):
        return data.value
    elif isinstance(data, Path):
        return str(data)
    elif isinstance(data, (bool, np.bool_)):
        return bool(data)
    elif isinstance(data, (int, np.integer)):
        return int(data)
    elif isinstance(data, (float, np.floating)):
        value = float(data)
        return value if np.isfinite(value) else None
    elif hasattr(data, '__dict__'):
        return to_json_serializable(data.__dict__)
    else:
        return data


def canonical_json(data: Any) -> str:
    """Compact JSON with sorted keys."""
    return json.dumps(to_json_serializable(data), sort_keys=True, separators=(",", ":"))


def stable_hash(data: Any) -> str:
    """sha256 of the canonical JSON form."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()
