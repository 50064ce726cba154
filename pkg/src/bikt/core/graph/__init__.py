"""
Graphs, datasets, propagation operators, splits and homophily analysis.
"""

from bikt.core.graph.homophily import homophily
from bikt.core.graph.loader import load_graph, load_graph_dir, load_splits, save_graph, save_splits
from bikt.core.graph.models import Graph, HomophilyReport, SplitMasks, build_graph
from bikt.core.graph.normalize import identity_propagation, normalize_gcn, normalize_mean
from bikt.core.graph.splits import make_inductive, make_splits
from bikt.core.graph.synthetic import synth_sbm

__all__ = [
    "Graph",
    "HomophilyReport",
    "SplitMasks",
    "build_graph",
    "homophily",
    "identity_propagation",
    "load_graph",
    "load_graph_dir",
    "load_splits",
    "make_inductive",
    "make_splits",
    "normalize_gcn",
    "normalize_mean",
    "save_graph",
    "save_splits",
    "synth_sbm",
]
