"""
Run outputs: summary JSON, per-epoch metrics CSV and checkpoint paths.
"""

import csv
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from pydantic import BaseModel

from bikt.intelligence.training.records import PhaseRecord

SUMMARY_FILE = "summary.json"
METRICS_FILE = "metrics.csv"
CHECKPOINT_DIR = "checkpoints"
METRIC_COLUMNS = ["seed", "phase", "epoch", "loss_total", "loss_sl", "loss_ki", "loss_ps", "val_acc"]


def phase_label(index: int, record: PhaseRecord) -> str:
    return f"{index:02d}_{record.phase.value}"


def checkpoint_path(output_dir: Path, seed: int, index: int, record: PhaseRecord) -> Path:
    return Path(output_dir) / CHECKPOINT_DIR / f"seed{seed}" / f"{phase_label(index, record)}.bin"


def _blank(value: Optional[float]):
    return "" if value is None else repr(float(value))


def metric_rows(seed: int, records: Iterable[PhaseRecord]) -> List[Dict[str, object]]:
    """One row per epoch of every phase."""
    rows = []
    for record in records:
        for stats in record.epochs:
            rows.append({
                "seed": seed,
                "phase": record.phase.value,
                "epoch": stats.epoch,
                "loss_total": _blank(stats.loss_total),
                "loss_sl": _blank(stats.loss_sl),
                "loss_ki": _blank(stats.loss_ki),
                "loss_ps": _blank(stats.loss_ps),
                "val_acc": _blank(stats.val_acc),
            })
    return rows


def write_metrics_csv(rows: Iterable[Dict[str, object]], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=METRIC_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return path


def write_summary(summary: BaseModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(summary.model_dump(mode="json"), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path
