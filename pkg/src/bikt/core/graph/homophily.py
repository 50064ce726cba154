"""
Node homophily: the share of a node's neighbors that carry its label.
"""

import numpy as np

from bikt.core.graph.models import Graph, HomophilyReport

ASSORTATIVE_ABOVE = 0.8
DISASSORTATIVE_BELOW = 0.2


def homophily(graph: Graph) -> HomophilyReport:
    degree = graph.degrees()
    owners = np.repeat(np.arange(graph.n), degree)
    same = graph.labels[graph.adj.indices] == graph.labels[owners]
    agreeing = np.bincount(owners, weights=same.astype(np.float64), minlength=graph.n)

    ratios = np.full(graph.n, np.nan)
    connected = degree > 0
    ratios[connected] = agreeing[connected] / degree[connected]

    assortative = np.flatnonzero(connected & (ratios > ASSORTATIVE_ABOVE))
    disassortative = np.flatnonzero(connected & (ratios < DISASSORTATIVE_BELOW))
    middle = np.flatnonzero(
        connected & (ratios >= DISASSORTATIVE_BELOW) & (ratios <= ASSORTATIVE_ABOVE)
    )
    return HomophilyReport(ratios=ratios, assortative=assortative,
                           disassortative=disassortative, middle=middle)
