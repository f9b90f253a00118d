"""Comparison methods: fairness-agnostic IMM, Myopic and naive maximin Greedy."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .agm import PoolPhi
from .diffusion import activation_frequencies
from .errors import BudgetError, DataError
from .graph import Graph, GroupStructure
from .ris import ImmParams, RRSetPool, build_group_pool, compute_theta, greedy_max_cover
from .streams import SeedLike, as_seed_sequence, substream

IMM = "imm"
MYOPIC = "myopic"
GREEDY = "greedy"

DEFAULT_MYOPIC_SAMPLES = 1000


@dataclass(frozen=True)
class BaselineResult:
    """Seeds in selection order; ``trace`` pairs each pick with the score it won with."""

    method: str
    seeds: tuple[int, ...]
    trace: tuple[tuple[int, float], ...]
    phi_hat: float | None = None

    def to_json(self, g: Graph | None = None, c: GroupStructure | None = None, rho: float | None = None) -> dict:
        name = (lambda v: g.labels[v]) if g is not None else int
        return {
            "strategy": self.method,
            "seeds": [name(v) for v in self.seeds],
            "phi_hat": self.phi_hat,
            "diagnostics": {
                "k_prime": None,
                "k_c": None,
                "q_c": None,
                "xi": None,
                "floors": None,
                "trace": [[name(v), score] for v, score in self.trace],
            },
        }


def _check_budget(g: Graph, k: int) -> None:
    if k < 1 or k > g.n:
        raise BudgetError(f"budget k={k} must lie in [1, {g.n}]")


def global_imm(
    g: Graph,
    k: int,
    params: ImmParams = ImmParams(),
    seed: SeedLike = None,
    threads: int | None = None,
    pool: RRSetPool | None = None,
) -> BaselineResult:
    """IMM on the whole graph: one pool with roots uniform over ``V``, greedy max-cover."""
    _check_budget(g, k)
    if pool is None:
        root = as_seed_sequence(seed)
        whole = GroupStructure.single(g.n)
        theta = compute_theta(g, whole, 0, k, params, seed=root, threads=threads)
        pool = build_group_pool(g, whole, 0, theta, seed=root, threads=threads)
    result = greedy_max_cover(pool, k)
    return BaselineResult(IMM, result.seeds, tuple(zip(result.seeds, map(float, result.gains))))


def myopic(
    g: Graph,
    k: int,
    samples: int = DEFAULT_MYOPIC_SAMPLES,
    seed: SeedLike = None,
    threads: int | None = None,
) -> BaselineResult:
    """Repeatedly seed the node least likely to be activated by the current seeds.

    Activation probabilities come from ``samples`` Monte Carlo runs per round.
    With no seeds every probability is zero, so the first pick is node 0.
    """
    _check_budget(g, k)
    if samples < 1:
        raise DataError("number of Monte Carlo samples must be >= 1")
    root = as_seed_sequence(seed)
    seeds: list[int] = []
    trace = []
    for it in range(k):
        if seeds:
            probs = activation_frequencies(g, seeds, samples, substream(root, "myopic", it), threads)
        else:
            probs = np.zeros(g.n)
        probs[seeds] = np.inf
        v = int(np.argmin(probs))
        trace.append((v, float(probs[v])))
        seeds.append(v)
    return BaselineResult(MYOPIC, tuple(seeds), tuple(trace))


def naive_greedy(
    g: Graph,
    c: GroupStructure,
    k: int,
    pools: Sequence[RRSetPool] | None = None,
    params: ImmParams = ImmParams(),
    seed: SeedLike = None,
    threads: int | None = None,
) -> BaselineResult:
    """Add, one at a time, the node giving the largest pool-estimated maximin objective.

    Without ``pools`` one pool per group is built with IMM sample sizes.
    """
    _check_budget(g, k)
    if pools is None:
        root = as_seed_sequence(seed)
        pools = [build_group_pool(g, c, gi, compute_theta(g, c, gi, k, params, root, threads), root, threads)
                 for gi in range(c.m)]
    if len(pools) != c.m:
        raise DataError("need exactly one pool per group")
    phi = PoolPhi(pools)
    seeds: list[int] = []
    trace = []
    for _ in range(k):
        scores = phi.values_with_all()
        scores[seeds] = -np.inf
        v = int(np.argmax(scores))
        value = phi.add(v)
        seeds.append(v)
        trace.append((v, value))
    return BaselineResult(GREEDY, tuple(seeds), tuple(trace), phi.value)
