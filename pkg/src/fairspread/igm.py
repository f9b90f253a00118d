"""Inner-group maximization: one IMM run per group, giving an ``m x k`` seed matrix."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import BudgetError, DataError
from .graph import Graph, GroupStructure
from .ris import ImmParams, RRSetPool, build_group_pool, compute_theta, greedy_max_cover
from .streams import SeedLike, as_seed_sequence


@dataclass(frozen=True)
class SeedMatrix:
    """Per-group seed rows in greedy selection order.

    ``rows[c][i]`` is the ``(i+1)``-th seed chosen for group ``c``; ``gains[c][i]``
    is the number of newly covered RR sets it brought in that group's pool.
    """

    rows: tuple[tuple[int, ...], ...]
    gains: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.gains):
            raise DataError("rows and gains must have one entry per group")
        for row, gain in zip(self.rows, self.gains):
            if len(row) != self.k or len(gain) != self.k:
                raise DataError("every row must hold exactly k seeds")
            if len(set(row)) != len(row):
                raise DataError("a seed row may not repeat a node")

    @property
    def m(self) -> int:
        return len(self.rows)

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.rows)

    def distinct_nodes(self) -> set[int]:
        return {v for row in self.rows for v in row}

    def cross_row_duplicates(self) -> dict[int, list[int]]:
        """Nodes appearing in more than one row, mapped to the groups that list them."""
        where = defaultdict(list)
        for gi, row in enumerate(self.rows):
            for v in row:
                where[v].append(gi)
        return {v: groups for v, groups in sorted(where.items()) if len(groups) > 1}

    def to_json(self, g: Graph | None = None, c: GroupStructure | None = None) -> dict:
        name = (lambda v: g.labels[v]) if g is not None else int
        return {
            "k": self.k,
            "groups": [
                {
                    "group": c.labels[gi] if c is not None else gi,
                    "row": [name(v) for v in row],
                    "gains": list(gain),
                }
                for gi, (row, gain) in enumerate(zip(self.rows, self.gains))
            ],
        }


@dataclass(frozen=True)
class IgmOutput:
    matrix: SeedMatrix
    pools: tuple[RRSetPool, ...]
    params: ImmParams
    thetas: tuple[int, ...]


def run_igm(
    g: Graph,
    c: GroupStructure,
    k: int,
    params: ImmParams = ImmParams(),
    seed: SeedLike = None,
    threads: int | None = None,
) -> IgmOutput:
    """Run IMM inside every group and keep the pools for across-group selection.

    Seeds for a group's row are drawn from all of ``V``, not just the group.
    """
    if k < 1 or k > g.n:
        raise BudgetError(f"budget k={k} must lie in [1, {g.n}]")
    if c.n != g.n:
        raise DataError("group structure does not match graph size")
    root = as_seed_sequence(seed)
    rows, gains, pools, thetas = [], [], [], []
    for group in range(c.m):
        theta = compute_theta(g, c, group, k, params, seed=root, threads=threads)
        pool = build_group_pool(g, c, group, theta, seed=root, threads=threads)
        result = greedy_max_cover(pool, k)
        rows.append(result.seeds)
        gains.append(result.gains)
        pools.append(pool)
        thetas.append(theta)
    return IgmOutput(SeedMatrix(tuple(rows), tuple(gains), k), tuple(pools), params, tuple(thetas))
