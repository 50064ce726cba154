"""
Reading and writing graph datasets and split files.

Layout of a dataset directory:
    edges.txt      one edge per line, two whitespace-separated node ids, '#' comments
    features.csv   row i = features of node i, no header
    labels.csv     row i = integer label of node i
"""

import json
import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from bikt.core.errors import ConsistencyError, GraphParseError, NodeRangeError
from bikt.core.graph.models import Graph, SplitMasks, build_graph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

EDGES_FILE = "edges.txt"
FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.csv"


def _read_edges(path: Path) -> List[Tuple[int, int, int]]:
    edges = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphParseError(
                    f"{path}: expected two node ids, found {len(parts)} fields", line_number
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(f"{path}: node ids must be integers", line_number)
            if u < 0 or v < 0:
                raise GraphParseError(f"{path}: node ids must be nonnegative", line_number)
            edges.append((u, v, line_number))
    return edges


def _read_table(path: Path, dtype) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", dtype=dtype, ndmin=2, encoding="utf-8")
    except ValueError as exc:
        raise GraphParseError(f"{path}: {exc}")


def load_graph(edge_list_path: PathLike, features_path: PathLike, labels_path: PathLike) -> Graph:
    """
    Load an undirected graph from an edge list plus feature and label CSVs.

    Args:
        edge_list_path: Edge list file
        features_path: Feature CSV (n rows)
        labels_path: Label CSV (n rows, one column)

    Returns:
        Canonical graph with symmetrized, deduplicated edges and no self-loops

    Raises:
        GraphParseError: On malformed input lines
        NodeRangeError: If an edge references a node id >= n
        ConsistencyError: If feature and label row counts differ
    """
    labels = _read_table(Path(labels_path), np.int64)
    if labels.shape[1] != 1:
        raise GraphParseError(f"{labels_path}: expected one label column, got {labels.shape[1]}")
    labels = labels[:, 0]
    n = labels.shape[0]

    features = _read_table(Path(features_path), np.float64)
    if features.shape[0] != n:
        raise ConsistencyError(f"{features_path} has {features.shape[0]} rows, expected {n}")

    raw_edges = _read_edges(Path(edge_list_path))
    for u, v, line_number in raw_edges:
        if u >= n or v >= n:
            raise NodeRangeError(
                f"{edge_list_path}: line {line_number}: node id {max(u, v)} outside [0, {n})"
            )

    self_loops = sum(1 for u, v, _ in raw_edges if u == v)
    if self_loops:
        logger.warning(f"Dropped {self_loops} self-loop(s) from {edge_list_path}")
    pairs = {(min(u, v), max(u, v)) for u, v, _ in raw_edges if u != v}
    duplicates = len(raw_edges) - self_loops - len(pairs)
    if duplicates:
        logger.warning(f"Merged {duplicates} duplicate edge line(s) in {edge_list_path}")

    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    graph = build_graph(n, edges, features, labels)
    logger.info(
        f"Loaded graph with {graph.n} nodes, {graph.num_edges} edges, "
        f"{graph.num_classes} classes"
    )
    return graph


def load_graph_dir(directory: PathLike) -> Graph:
    directory = Path(directory)
    return load_graph(directory / EDGES_FILE, directory / FEATURES_FILE, directory / LABELS_FILE)


def save_graph(graph: Graph, directory: PathLike) -> Path:
    """Write a graph in the dataset directory layout; floats round-trip exactly."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / EDGES_FILE, "w", encoding="utf-8") as handle:
        for u, v in graph.edge_pairs():
            handle.write(f"{u}\t{v}\n")
    np.savetxt(directory / FEATURES_FILE, graph.features, delimiter=",", fmt="%.17g")
    np.savetxt(directory / LABELS_FILE, graph.labels, fmt="%d")
    return directory


def load_splits(path: PathLike, n: int) -> SplitMasks:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise GraphParseError(f"{path}: {exc.msg}", exc.lineno)
    return SplitMasks.from_json_dict(data, n)


def save_splits(masks: SplitMasks, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(masks.to_json_dict(), handle)
