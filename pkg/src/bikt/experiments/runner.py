"""
Experiment runner: builds data, trains every model view for each seed and
aggregates the results.
"""

import logging
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from bikt.core.graph.loader import load_graph, load_splits
from bikt.core.graph.models import Graph, SplitMasks
from bikt.core.graph.splits import (
    make_inductive,
    make_splits,
    resolve_split_seed,
    restrict_to_observed,
)
from bikt.core.graph.synthetic import synth_sbm
from bikt.core.models.checkpoint import save_params
from bikt.core.models.layers import init_params
from bikt.core.models.network import build_model
from bikt.core.utils.metrics import MetricSummary
from bikt.diagnostics.evaluation import EvalReport, aggregate_runs, eval_model
from bikt.diagnostics.investigation import investigate, train_mlp_re
from bikt.experiments.artifacts import (
    METRICS_FILE,
    SUMMARY_FILE,
    checkpoint_path,
    metric_rows,
    phase_label,
    write_metrics_csv,
    write_summary,
)
from bikt.experiments.config import RunConfig, RunMode
from bikt.intelligence.generator.generator import save_generator
from bikt.intelligence.training.records import PhaseRecord
from bikt.intelligence.training.schedule import run_bikt
from bikt.intelligence.training.trainer import train_supervised

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = Path("runs")

MetricRow = Dict[str, object]


class SeedResult(BaseModel):
    """Everything one seed produced, except per-epoch rows."""

    seed: int
    reports: Dict[str, EvalReport] = Field(default_factory=dict)
    union: Dict[str, float] = Field(default_factory=dict)
    intersection: Dict[str, float] = Field(default_factory=dict)
    iterations: List[Dict[str, Union[int, float]]] = Field(default_factory=list)
    phases: List[Dict[str, object]] = Field(default_factory=list)
    timing: Dict[str, float] = Field(default_factory=dict)


class RunSummary(BaseModel):
    """
    Result of a run. Fields named ``timing`` hold wall-clock measurements and are
    the only part that differs between identical runs.
    """

    config_hash: str
    mode: RunMode
    seeds: List[int]
    config: Dict[str, object]
    per_seed: List[SeedResult]
    aggregate: Dict[str, Dict[str, Optional[Dict[str, float]]]] = Field(default_factory=dict)
    union: Dict[str, Optional[Dict[str, float]]] = Field(default_factory=dict)
    intersection: Dict[str, Optional[Dict[str, float]]] = Field(default_factory=dict)
    iterations: List[Dict[str, object]] = Field(default_factory=list)
    timing: Dict[str, float] = Field(default_factory=dict)


def _summary_dict(summary: Optional[MetricSummary]) -> Optional[Dict[str, float]]:
    if summary is None:
        return None
    return {"mean": summary.mean, "std": summary.std, "n": summary.n}


def load_dataset(config: RunConfig) -> Graph:
    dataset = config.dataset
    if dataset.sbm is not None:
        sbm = dataset.sbm
        return synth_sbm(sbm.n, sbm.num_classes, sbm.intra_p, sbm.inter_p,
                         sbm.feat_dim, sbm.feat_noise, sbm.seed)
    return load_graph(dataset.edges, dataset.features, dataset.labels)


def build_splits(config: RunConfig, graph: Graph, seed: int) -> Tuple[Graph, SplitMasks]:
    """Training graph and masks for one seed (the training graph differs when inductive)."""
    split = config.split
    split_seed = resolve_split_seed(split.seed, seed)
    if split.splits_file is not None:
        masks = load_splits(split.splits_file, graph.n)
    else:
        masks = make_splits(graph, split.train_frac, split.val_frac, split_seed, split.stratified)
    if split.inductive and masks.observed.all():
        return make_inductive(graph, masks, split.holdout_frac, split_seed)
    if not masks.observed.all():
        return restrict_to_observed(graph, masks.observed), masks
    return graph, masks


def _write_checkpoints(output_dir: Path, seed: int, records: List[PhaseRecord]) -> None:
    for index, record in enumerate(records):
        path = checkpoint_path(output_dir, seed, index, record)
        if record.generator is not None:
            save_generator(record.generator, path)
        elif record.final_params is not None:
            save_params(record.final_params, path)


def run_seed(config: RunConfig, seed: int, output_dir: Path) -> Tuple[SeedResult, List[MetricRow]]:
    """
    Execute the configured mode for one seed.

    Returns:
        The seed result and its per-epoch metric rows
    """
    started = time.perf_counter()
    graph = load_dataset(config)
    train_graph, masks = build_splits(config, graph, seed)
    cfg = config.train_for_seed(seed)
    architecture = config.model.architecture()
    result = SeedResult(seed=seed)
    records: List[PhaseRecord] = []
    logger.info(f"Seed {seed}: mode {config.mode.value}")

    if config.mode is RunMode.BIKT:
        outcome = run_bikt(train_graph, masks, cfg, architecture, eval_graph=graph)
        records.extend(outcome.records)
        base_params = outcome.records[0].final_params
        base_gnn = build_model(base_params, architecture.propagation, train_graph)
        mlp_re, mlp_re_record = train_mlp_re(train_graph, masks, cfg, architecture)
        records.append(mlp_re_record)
        study = investigate(base_gnn, train_graph, masks, cfg, architecture, graph, mlp_re)
        result.reports.update(study.reports)
        result.union.update(study.union)
        result.intersection.update(study.intersection)
        _, result.reports["bikt_gnn"] = eval_model(outcome.gnn, graph, masks)
        _, result.reports["bikt_mlp"] = eval_model(outcome.mlp, graph, masks)
        result.iterations = [dict(vars(item)) for item in outcome.iterations]
    else:
        params = init_params(architecture.layer_specs(graph.feature_dim, graph.num_classes), cfg.seed)
        gnn = build_model(params, architecture.propagation, train_graph)
        records.append(train_supervised(gnn, train_graph, masks, cfg))
        if config.mode is RunMode.SUPERVISED:
            _, result.reports["gnn"] = eval_model(gnn, graph, masks)
        else:
            study = investigate(gnn, train_graph, masks, cfg, architecture, graph)
            records.extend(study.records.values())
            result.reports.update(study.reports)
            result.union.update(study.union)
            result.intersection.update(study.intersection)

    _write_checkpoints(output_dir, seed, records)
    result.phases = [record.summary() for record in records]
    result.timing = {phase_label(i, r): r.wall_clock_s for i, r in enumerate(records)}
    result.timing["total_s"] = time.perf_counter() - started
    return result, metric_rows(seed, records)


class ExperimentRunner:
    """
    Runs a configuration over its seeds and writes summary, metrics and checkpoints.

    ``as_written`` is the configuration before its paths were resolved; the
    summary's hash and config echo use it so they do not depend on where the
    file was read from.
    """

    def __init__(self, config: RunConfig, output_dir: Optional[Path] = None, jobs: int = 1,
                 seeds: Optional[List[int]] = None, as_written: Optional[RunConfig] = None):
        self.config = config
        self.as_written = as_written or config
        self.output_dir = Path(output_dir or config.output_dir or DEFAULT_OUTPUT_DIR)
        self.jobs = max(1, jobs)
        self.seeds = sorted(seeds if seeds is not None else config.seeds)

    def run(self) -> RunSummary:
        from bikt.worker import run_seeds

        started = time.perf_counter()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(
            f"Running {self.config.mode.value} over seeds {self.seeds} with {self.jobs} job(s)"
        )
        outcomes = run_seeds(self.config, self.seeds, self.output_dir, self.jobs)

        per_seed = [result for result, _ in outcomes]
        rows = [row for _, seed_rows in outcomes for row in seed_rows]
        summary = self._summarize(per_seed)
        summary.timing["total_s"] = time.perf_counter() - started

        write_metrics_csv(rows, self.output_dir / METRICS_FILE)
        write_summary(summary, self.output_dir / SUMMARY_FILE)
        logger.info(f"Wrote {SUMMARY_FILE} and {len(rows)} metric rows to {self.output_dir}")
        return summary

    def _summarize(self, per_seed: List[SeedResult]) -> RunSummary:
        summary = RunSummary(
            config_hash=self.as_written.config_hash(),
            mode=self.config.mode,
            seeds=self.seeds,
            config=self.as_written.model_dump(mode="json"),
            per_seed=per_seed,
        )
        for view in per_seed[0].reports:
            aggregated = aggregate_runs([result.reports[view] for result in per_seed])
            summary.aggregate[view] = {k: _summary_dict(v) for k, v in aggregated.items()}
        for name in per_seed[0].union:
            summary.union[name] = _summary_dict(
                aggregate_runs([{"value": r.union[name]} for r in per_seed])["value"]
            )
            summary.intersection[name] = _summary_dict(
                aggregate_runs([{"value": r.intersection[name]} for r in per_seed])["value"]
            )
        for index, _ in enumerate(per_seed[0].iterations):
            rows = [result.iterations[index] for result in per_seed]
            entry: Dict[str, object] = {"iteration": index}
            for key in ("gnn_test_acc", "mlp_test_acc", "gnn_val_acc", "mlp_val_acc"):
                entry[key] = _summary_dict(
                    aggregate_runs([{"value": row[key]} for row in rows])["value"]
                )
            summary.iterations.append(entry)
        return summary
