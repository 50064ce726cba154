"""
Command-line interface for BiKT.
"""

import logging
from pathlib import Path
from typing import Optional

import typer

from bikt.core.errors import BiktError
from bikt.experiments.validator import ConfigValidator, ValidationResult

# Exit codes
EXIT_RUNTIME_FAILURE = 1
EXIT_INVALID_CONFIG = 2

# Setup logging
logger = logging.getLogger(__name__)

app = typer.Typer(
    name="bikt", help="BiKT - bi-directional knowledge transfer between a GNN and its derived MLP"
)


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, help="Override LOG_LEVEL"),
):
    """Check the environment and configure logging once per invocation."""
    from config.logging_config import setup_logging
    from config.settings import get_settings

    settings = get_settings()
    try:
        settings.validate_critical_env_vars()
    except ValueError as e:
        typer.echo(f"✗ {e}", err=True)
        raise typer.Exit(EXIT_INVALID_CONFIG)
    setup_logging(log_level.upper() if log_level else settings.log_level, settings.log_format,
                  settings.log_file)


def echo_issues(result: ValidationResult) -> None:
    """Print validation errors and warnings, one per line."""
    for issue in result.errors:
        typer.echo(f"✗ {issue}", err=True)
    for issue in result.warnings:
        typer.echo(f"! {issue}", err=True)


@app.command()
def validate(config_path: Path = typer.Argument(..., help="Run configuration (JSON)")):
    """Check a run configuration without running it."""
    result = ConfigValidator().validate_file(config_path)
    echo_issues(result)
    if not result.is_valid:
        raise typer.Exit(EXIT_INVALID_CONFIG)
    typer.echo(f"✓ {config_path} is valid")


@app.command()
def run(
    config_path: Path = typer.Argument(..., help="Run configuration (JSON)"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Parallel seed workers"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
):
    """Run an experiment and write summary.json, metrics.csv and checkpoints."""
    from config.settings import get_settings
    from bikt.experiments.runner import ExperimentRunner

    result = ConfigValidator().validate_file(config_path)
    echo_issues(result)
    if not result.is_valid:
        raise typer.Exit(EXIT_INVALID_CONFIG)

    settings = get_settings()
    written = result.config
    config = written.resolve_paths(config_path.parent)
    seeds = [settings.seed_override] if settings.seed_override is not None else None
    if seeds:
        logger.warning(f"BIKT_SEED_OVERRIDE active: running seed {seeds[0]} only")
    output_dir = out or config.output_dir or settings.default_output_dir

    try:
        runner = ExperimentRunner(config, output_dir, jobs or settings.default_jobs, seeds,
                                  as_written=written)
        summary = runner.run()
    except BiktError as e:
        logger.error(f"Run failed: {e}", exc_info=True)
        typer.echo(f"✗ Run failed: {e}", err=True)
        raise typer.Exit(EXIT_RUNTIME_FAILURE)
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        typer.echo(f"✗ Unexpected failure: {e}", err=True)
        raise typer.Exit(EXIT_RUNTIME_FAILURE)

    typer.echo(f"✓ Run {summary.config_hash[:12]} finished ({summary.mode.value}, "
               f"{len(summary.seeds)} seed(s))")
    for view, metrics in summary.aggregate.items():
        acc = metrics.get("accuracy")
        if acc is not None:
            typer.echo(f"  • {view}: {acc['mean']:.4f} ± {acc['std']:.4f}")
    typer.echo(f"  Outputs: {output_dir}")


@app.command()
def synth(
    n: int = typer.Option(1000, min=2, help="Number of nodes"),
    classes: int = typer.Option(5, min=2, help="Number of classes"),
    intra_p: float = typer.Option(0.02, help="Edge probability within a class"),
    inter_p: float = typer.Option(0.002, help="Edge probability across classes"),
    feat_dim: int = typer.Option(16, min=1, help="Feature dimension"),
    feat_noise: float = typer.Option(1.0, min=0.0, help="Feature noise standard deviation"),
    seed: int = typer.Option(0, help="Random seed"),
    out: Path = typer.Option(..., "--out", help="Dataset directory to write"),
):
    """Sample a stochastic block model dataset and write it to disk."""
    from bikt.core.graph.homophily import homophily
    from bikt.core.graph.loader import save_graph
    from bikt.core.graph.synthetic import synth_sbm

    try:
        graph = synth_sbm(n, classes, intra_p, inter_p, feat_dim, feat_noise, seed)
        save_graph(graph, out)
    except BiktError as e:
        typer.echo(f"✗ Error: {e}", err=True)
        raise typer.Exit(EXIT_INVALID_CONFIG)

    typer.echo(f"✓ Wrote {graph.n} nodes and {graph.num_edges} edges to {out}")
    typer.echo(f"  Mean homophily: {homophily(graph).mean_ratio():.3f}")


@app.command()
def version():
    """Show version information."""
    from bikt import __version__

    typer.echo(f"BiKT version {__version__}")


if __name__ == "__main__":
    app()
