"""Independent Cascade simulation and Monte Carlo estimators of spread and group utility."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DataError
from .graph import Graph, GroupStructure
from .streams import SeedLike, as_seed_sequence, chunk_bounds, generator, map_chunks

DEFAULT_EVAL_SAMPLES = 10_000


def as_seed_array(seeds: Iterable[int], n: int) -> np.ndarray:
    arr = np.asarray(list(seeds), dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise DataError("seed node id out of range")
    if np.unique(arr).size != arr.size:
        raise DataError("seed set contains duplicates")
    return arr


@dataclass(frozen=True)
class LiveEdgeGraph:
    """Boolean mask over ``Graph`` edge ids: ``kept[e]`` means edge ``e`` is live."""

    kept: np.ndarray

    def reachable(self, g: Graph, seeds: Iterable[int]) -> set[int]:
        """Nodes reachable from ``seeds`` over live edges (forward BFS)."""
        reached = set(int(s) for s in seeds)
        frontier = list(reached)
        while frontier:
            u = frontier.pop()
            for e in g.forward_adj(u):
                if self.kept[e]:
                    v = int(g.targets[e])
                    if v not in reached:
                        reached.add(v)
                        frontier.append(v)
        return reached


@dataclass(frozen=True)
class DiffusionTrace:
    """Nodes activated at each step; ``activated_by_step[0]`` is the seed set."""

    activated_by_step: tuple[frozenset[int], ...]

    @property
    def activated(self) -> frozenset[int]:
        return frozenset().union(*self.activated_by_step)

    def __len__(self) -> int:
        return sum(len(step) for step in self.activated_by_step)


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    samples: int
    std_error: float


@dataclass(frozen=True)
class GroupUtilityEstimate:
    utilities: tuple[SpreadEstimate, ...]
    sigma: SpreadEstimate

    @property
    def phi(self) -> float:
        """Minimum over groups of the mean utility (min of means, not mean of mins)."""
        return min(u.mean for u in self.utilities)


def sample_live_edge(g: Graph, rng: np.random.Generator) -> LiveEdgeGraph:
    g.require_probabilities()
    return LiveEdgeGraph(rng.random(g.edge_count) < g.probs)


def simulate_ic(g: Graph, seeds: Iterable[int], rng: np.random.Generator) -> DiffusionTrace:
    g.require_probabilities()
    seeds = as_seed_array(seeds, g.n)
    indptr, nbr, prob = g.csr_forward()
    stamp = np.zeros(g.n, dtype=np.int64)
    order = np.empty(g.n, dtype=np.int64)
    step_ends = np.empty(g.n + 2, dtype=np.int64)
    count, n_steps = _kernels.cascade(indptr, nbr, prob, seeds, rng, stamp, 1, order, step_ends)
    steps = [frozenset(order[: step_ends[0]].tolist())]
    for t in range(1, n_steps):
        lo, hi = step_ends[t - 1], step_ends[t]
        if hi > lo:
            steps.append(frozenset(order[lo:hi].tolist()))
    return DiffusionTrace(tuple(steps))


def _estimate(values: np.ndarray, scale: float = 1.0) -> SpreadEstimate:
    # integer totals keep the mean independent of summation order
    r = values.size
    total = int(values.sum())
    mean = total / r / scale
    if r > 1:
        sq = int((values.astype(np.int64) ** 2).sum())
        var = (sq - total * total / r) / (r - 1)
        se = math.sqrt(max(var, 0.0) / r) / scale
    else:
        se = 0.0
    return SpreadEstimate(mean, r, se)


def mc_group_counts(
    g: Graph,
    c: GroupStructure | None,
    seeds: Iterable[int],
    samples: int,
    seed: SeedLike = None,
    threads: int | None = None,
    tag: str = "mc",
) -> np.ndarray:
    """Per-run activated counts per group, shape ``(samples, m)``.

    Runs are split into fixed chunks; chunk ``i`` draws from substream ``(tag, i)``.
    """
    if samples < 1:
        raise DataError("number of Monte Carlo samples must be >= 1")
    g.require_probabilities()
    seeds = as_seed_array(seeds, g.n)
    root = as_seed_sequence(seed)
    if c is None:
        membership, m = np.zeros(g.n, dtype=np.int64), 1
    else:
        membership, m = c.membership, c.m
    indptr, nbr, prob = g.csr_forward()
    bounds = chunk_bounds(samples)

    def run(i: int) -> np.ndarray:
        lo, hi = bounds[i]
        return _kernels.mc_group_counts(indptr, nbr, prob, seeds, membership, m, hi - lo, generator(root, tag, i))

    return np.concatenate(map_chunks(run, len(bounds), threads), axis=0)


def estimate_sigma(
    g: Graph, seeds: Iterable[int], samples: int, seed: SeedLike = None, threads: int | None = None
) -> SpreadEstimate:
    counts = mc_group_counts(g, None, seeds, samples, seed, threads)
    return _estimate(counts[:, 0])


def estimate_group_utilities(
    g: Graph,
    c: GroupStructure,
    seeds: Iterable[int],
    samples: int,
    seed: SeedLike = None,
    threads: int | None = None,
) -> GroupUtilityEstimate:
    counts = mc_group_counts(g, c, seeds, samples, seed, threads)
    sizes = c.sizes
    utilities = tuple(_estimate(counts[:, i], float(sizes[i])) for i in range(c.m))
    return GroupUtilityEstimate(utilities, _estimate(counts.sum(axis=1)))


def activation_frequencies(
    g: Graph,
    seeds: Iterable[int],
    samples: int,
    seed: SeedLike = None,
    threads: int | None = None,
    tag: str = "mc-node",
) -> np.ndarray:
    """Fraction of runs in which each node ends up active."""
    if samples < 1:
        raise DataError("number of Monte Carlo samples must be >= 1")
    g.require_probabilities()
    seeds = as_seed_array(seeds, g.n)
    root = as_seed_sequence(seed)
    indptr, nbr, prob = g.csr_forward()
    bounds = chunk_bounds(samples)

    def run(i: int) -> np.ndarray:
        lo, hi = bounds[i]
        return _kernels.mc_node_counts(indptr, nbr, prob, seeds, hi - lo, generator(root, tag, i))

    hits = np.sum(map_chunks(run, len(bounds), threads), axis=0)
    return hits / samples
