"""Across-group maximization: build the final seed set from the IGM seed matrix.

Both strategies score candidates with the maximin objective estimated from the
stored IGM pools (``pool_phi``). Uniform selection breaks ties by smallest
node id. Greedy selection first orders tied candidates by their sorted utility
profile, which matters whenever several groups share the minimum.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError, DataError
from .graph import Graph, GroupStructure
from .igm import IgmOutput, SeedMatrix
from .ris import PoolCoverage, RRSetPool, coverage_utility

US = "agm-us"
GS = "agm-gs"

# a node that lifts one of several tied worst-off groups beats one that only
# helps a better-off group, even though both leave the minimum unchanged
LEXIMIN = "leximin"
SMALLEST_ID = "smallest-id"


class PoolPhi:
    """Incremental pool-estimated maximin objective for a growing seed set."""

    def __init__(self, pools: Sequence[RRSetPool]):
        if not pools:
            raise DataError("at least one pool is required")
        self.coverages = [PoolCoverage(p) for p in pools]
        self.seeds: list[int] = []

    @property
    def value(self) -> float:
        return min(cov.utility for cov in self.coverages)

    def value_with(self, v: int) -> float:
        return min(cov.utility_with(v) for cov in self.coverages)

    def values_with_all(self) -> np.ndarray:
        return np.min([cov.utilities_with_all() for cov in self.coverages], axis=0)

    def add(self, v: int) -> float:
        for cov in self.coverages:
            cov.add(v)
        self.seeds.append(int(v))
        return self.value

    def profile_with(self, v: int) -> tuple[float, ...]:
        """Group utilities after adding ``v``, sorted ascending; the first entry is the objective."""
        return tuple(sorted(cov.utility_with(v) for cov in self.coverages))

    def argmax(self, candidates: Iterable[int], tie_break: str = LEXIMIN) -> tuple[int, float]:
        """Candidate maximizing the objective after insertion.

        Equal objectives are resolved by the sorted utility profile (``LEXIMIN``)
        and then by smallest id; ``SMALLEST_ID`` skips the profile comparison.
        """
        if tie_break not in (LEXIMIN, SMALLEST_ID):
            raise ValueError(f"unknown tie-break rule {tie_break!r}")
        best, best_key = -1, None
        for v in sorted(candidates):
            key = self.profile_with(v) if tie_break == LEXIMIN else (self.value_with(v),)
            if best_key is None or key > best_key:
                best, best_key = v, key
        if best < 0:
            raise BudgetError("no candidate available")
        return best, best_key[0]


def pool_phi(pools: Sequence[RRSetPool], seeds: Iterable[int]) -> float:
    """Minimum over groups of the pool coverage fraction."""
    if not pools:
        raise DataError("at least one pool is required")
    seeds = list(seeds)
    return min(coverage_utility(p, seeds) for p in pools)


def xi(k: int, m: int) -> Fraction:
    """Imbalance correction ``mod(k, m) / (k m)``."""
    return Fraction(k % m, k * m)


@dataclass(frozen=True)
class BoundFloors:
    """Coefficients ``a`` such that ``Phi(S) >= a * Phi(S*)`` is claimed."""

    xi: Fraction
    us_theoretical: float
    us_empirical: float | None
    gs_disconnected: float
    gs_valid: bool | None


@dataclass(frozen=True)
class SelectionDiagnostics:
    k_prime: int
    prefix_takes: tuple[int, ...]
    extra_picks: tuple[int, ...]
    xi: Fraction
    theoretical_floor: float
    phi_trace: tuple[float, ...]


@dataclass(frozen=True)
class AgmResult:
    strategy: str
    seeds: tuple[int, ...]
    phi_hat: float
    diagnostics: SelectionDiagnostics
    epsilon: float

    def floors(self, rho: float | None = None) -> BoundFloors:
        return bound_report(self.diagnostics, len(self.diagnostics.prefix_takes), len(self.seeds), self.epsilon, rho)

    def to_json(self, g: Graph | None = None, c: GroupStructure | None = None, rho: float | None = None) -> dict:
        name = (lambda v: g.labels[v]) if g is not None else int
        d = self.diagnostics
        group_names = list(c.labels) if c is not None else list(range(len(d.prefix_takes)))
        floors = self.floors(rho)
        return {
            "strategy": self.strategy,
            "seeds": [name(v) for v in self.seeds],
            "phi_hat": self.phi_hat,
            "diagnostics": {
                "k_prime": d.k_prime,
                "k_c": dict(zip(group_names, d.prefix_takes)),
                "q_c": dict(zip(group_names, d.extra_picks)),
                "xi": float(d.xi),
                "floors": {
                    "us": floors.us_theoretical,
                    "us_empirical": floors.us_empirical,
                    "gs": floors.gs_disconnected,
                    "gs_valid": floors.gs_valid,
                },
                "trace": [[name(v), score] for v, score in zip(self.seeds, d.phi_trace)],
            },
        }


def bound_report(diag: SelectionDiagnostics | int | None, m: int, k: int, epsilon: float,
                 rho: float | None = None) -> BoundFloors:
    """Floor coefficients for AGM-US (theoretical and empirical) and AGM-GS.

    ``diag`` may be the diagnostics of a run or just ``k'``. The AGM-GS floor
    only applies to completely disconnected groups; ``gs_valid`` says whether it
    does when ``rho`` is known.
    """
    base = 1.0 - 1.0 / math.e - epsilon
    x = xi(k, m)
    k_prime = diag.k_prime if isinstance(diag, SelectionDiagnostics) else diag
    return BoundFloors(
        xi=x,
        us_theoretical=float(Fraction(1, m) - x) * base,
        us_empirical=None if k_prime is None else float(Fraction(k_prime, k)) * base,
        gs_disconnected=base,
        gs_valid=None if rho is None else rho == 0,
    )


def _prefix_lengths(matrix: SeedMatrix, chosen: set[int]) -> list[int]:
    out = []
    for row in matrix.rows:
        r = 0
        while r < len(row) and row[r] in chosen:
            r += 1
        out.append(r)
    return out


def _check_inputs(matrix: SeedMatrix, pools: Sequence[RRSetPool], k: int) -> None:
    if len(pools) != matrix.m:
        raise DataError("need exactly one pool per seed-matrix row")
    if k < 1:
        raise BudgetError("budget k must be >= 1")
    if k > len(matrix.distinct_nodes()):
        raise BudgetError(f"budget k={k} exceeds the {len(matrix.distinct_nodes())} distinct nodes in the seed matrix")


def _diagnostics(matrix, chosen, takes, k_prime, k, epsilon, trace) -> SelectionDiagnostics:
    extra = [sum(v in chosen for v in row) - t for row, t in zip(matrix.rows, takes)]
    x = xi(k, matrix.m)
    floor = (float(Fraction(1, matrix.m) - x)) * (1.0 - 1.0 / math.e - epsilon)
    return SelectionDiagnostics(k_prime, tuple(takes), tuple(extra), x, floor, tuple(trace))


def agm_us(matrix: SeedMatrix, pools: Sequence[RRSetPool], k: int, epsilon: float = 0.1,
           tie_break: str = SMALLEST_ID) -> AgmResult:
    """Uniform selection: take whole columns of the seed matrix while they fit.

    In the first column that does not fit, the remaining budget is filled one
    node at a time with the column node that maximizes the pool objective.
    Columns whose nodes are all selected already add nothing and the scan moves on.
    """
    _check_inputs(matrix, pools, k)
    phi = PoolPhi(pools)
    seeds: list[int] = []
    chosen: set[int] = set()
    trace: list[float] = []
    col = completed = final = 0
    while len(seeds) < k:
        if col >= matrix.k:
            raise BudgetError("seed matrix exhausted before the budget was met")
        fresh = [v for v in dict.fromkeys(matrix.column(col)) if v not in chosen]
        if len(seeds) + len(fresh) <= k:
            for v in fresh:
                seeds.append(v)
                chosen.add(v)
                trace.append(phi.add(v))
            col += 1
            completed = final = col
            continue
        final = col + 1
        remaining = set(fresh)
        while len(seeds) < k:
            v, _ = phi.argmax(remaining, tie_break)
            remaining.discard(v)
            seeds.append(v)
            chosen.add(v)
            trace.append(phi.add(v))
    takes = [min(p, final) for p in _prefix_lengths(matrix, chosen)]
    diag = _diagnostics(matrix, chosen, takes, completed, k, epsilon, trace)
    return AgmResult(US, tuple(seeds), phi.value, diag, epsilon)


def agm_gs(matrix: SeedMatrix, pools: Sequence[RRSetPool], k: int, epsilon: float = 0.1,
           tie_break: str = LEXIMIN) -> AgmResult:
    """Greedy selection over the current prefix node of every row.

    Each round the prefix nodes are scored by the objective after insertion and
    the best one is added; every row's prefix then skips past selected nodes.
    A row that runs out of nodes stops contributing candidates.
    """
    _check_inputs(matrix, pools, k)
    phi = PoolPhi(pools)
    seeds: list[int] = []
    chosen: set[int] = set()
    trace: list[float] = []
    prefix = [0] * matrix.m
    while len(seeds) < k:
        for gi, row in enumerate(matrix.rows):
            while prefix[gi] < matrix.k and row[prefix[gi]] in chosen:
                prefix[gi] += 1
        candidates = {row[prefix[gi]] for gi, row in enumerate(matrix.rows) if prefix[gi] < matrix.k}
        if not candidates:
            raise BudgetError("every seed row exhausted before the budget was met")
        v, _ = phi.argmax(candidates, tie_break)
        seeds.append(v)
        chosen.add(v)
        trace.append(phi.add(v))
    takes = _prefix_lengths(matrix, chosen)
    diag = _diagnostics(matrix, chosen, takes, min(takes), k, epsilon, trace)
    return AgmResult(GS, tuple(seeds), phi.value, diag, epsilon)


def run_agm(igm: IgmOutput, k: int, strategy: str = GS, tie_break: str | None = None) -> AgmResult:
    """Run one strategy; ``tie_break=None`` keeps the strategy's own default."""
    extra = {} if tie_break is None else {"tie_break": tie_break}
    if strategy == US:
        return agm_us(igm.matrix, igm.pools, k, igm.params.epsilon, **extra)
    if strategy == GS:
        return agm_gs(igm.matrix, igm.pools, k, igm.params.epsilon, **extra)
    raise ValueError(f"unknown AGM strategy {strategy!r}")
