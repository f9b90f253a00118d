"""Small graph builders shared by the test modules."""

from __future__ import annotations

import itertools

import numpy as np

from fairspread.graph import Graph, GroupStructure, assign_wc_probabilities
from fairspread.synth import SynthSpec, planted_partition


def graph(edges, n=None, p=None) -> Graph:
    """Directed graph over dense ids; ``p`` fills edges given as pairs."""
    rows = [e if len(e) == 3 or p is None else (e[0], e[1], p) for e in edges]
    return Graph.from_edges(rows, n=n)


def chain(p=1.0) -> Graph:
    return graph([(0, 1), (1, 2)], n=3, p=p)


def pairs(p=0.5) -> tuple[Graph, GroupStructure]:
    """Two disconnected edges 0->1 and 2->3, one group per edge."""
    return graph([(0, 1), (2, 3)], n=4, p=p), GroupStructure.from_lists([[0, 1], [2, 3]])


def groups(*lists) -> GroupStructure:
    return GroupStructure.from_lists(lists)


PROB_CHOICES = (0.25, 0.5, 0.75, 1.0)


def random_tiny(rng: np.random.Generator, max_nodes=6, max_edges=10, weighting="mixed"):
    """Random graph with at most ``max_nodes`` nodes and ``max_edges`` edges plus a 2-3 group partition."""
    n = int(rng.integers(3, max_nodes + 1))
    pairs_all = [(u, v) for u, v in itertools.permutations(range(n), 2)]
    n_edges = int(rng.integers(1, min(max_edges, len(pairs_all)) + 1))
    chosen = rng.choice(len(pairs_all), size=n_edges, replace=False)
    edges = [pairs_all[i] for i in sorted(chosen)]
    m = int(rng.integers(2, min(3, n) + 1))
    membership = np.concatenate([np.arange(m), rng.integers(0, m, n - m)])
    rng.shuffle(membership)
    c = GroupStructure(membership)
    use_wc = weighting == "wc" or (weighting == "mixed" and rng.random() < 0.5)
    if use_wc:
        g = assign_wc_probabilities(graph(edges, n=n))
    else:
        g = graph([(u, v, float(rng.choice(PROB_CHOICES))) for u, v in edges], n=n)
    return g, c


def planted_tiny(rng: np.random.Generator, p_out: float, max_edges=16, max_group=5):
    """Planted-partition instance with 2-3 groups of at most ``max_group`` nodes and few edges."""
    while True:
        m = int(rng.integers(2, 4))
        sizes = tuple(int(s) for s in rng.integers(2, max_group + 1, m))
        p_in = float(rng.uniform(0.2, 0.8))
        spec = SynthSpec(sizes, p_in, p_out, int(rng.integers(0, 2**31)))
        try:
            g, c = planted_partition(spec)
        except ValueError:
            continue
        if g.edge_count <= max_edges:
            return assign_wc_probabilities(g), c, spec
