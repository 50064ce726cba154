"""
Seed workers.

Each seed runs in isolation; with more than one job the seeds are spread over a
process pool and the results are merged in seed order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

from bikt.experiments.config import RunConfig

logger = logging.getLogger(__name__)


def run_seed_job(config_data: Dict[str, Any], seed: int, output_dir: str) -> Tuple[Any, List[dict]]:
    """
    Run one seed from a plain-data configuration.

    Args:
        config_data: ``RunConfig.model_dump(mode="json")`` output
        seed: Run seed
        output_dir: Directory for this run's outputs

    Returns:
        The seed result and its metric rows
    """
    from bikt.experiments.runner import run_seed

    config = RunConfig.model_validate(config_data)
    return run_seed(config, seed, Path(output_dir))


def run_seeds(
    config: RunConfig, seeds: Sequence[int], output_dir: Path, jobs: int = 1
) -> List[Tuple[Any, List[dict]]]:
    """Run every seed, sequentially or on ``jobs`` worker processes; results sorted by seed."""
    config_data = config.model_dump(mode="json")
    ordered = sorted(seeds)
    if jobs <= 1 or len(ordered) == 1:
        return [run_seed_job(config_data, seed, str(output_dir)) for seed in ordered]

    workers = min(jobs, len(ordered))
    logger.info(f"Dispatching {len(ordered)} seeds to {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {seed: pool.submit(run_seed_job, config_data, seed, str(output_dir))
                   for seed in ordered}
        return [futures[seed].result() for seed in ordered]
