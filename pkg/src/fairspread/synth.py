"""Planted-partition generator for synthetic group-structured graphs."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import UNSET, Graph, GroupStructure


@dataclass(frozen=True)
class SynthSpec:
    """Directed planted partition: each ordered pair inside a group is an edge
    with probability ``p_in``, each cross-group pair with ``p_out``."""

    group_sizes: tuple[int, ...]
    p_in: float
    p_out: float
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_sizes", tuple(int(s) for s in self.group_sizes))
        if not self.group_sizes or min(self.group_sizes) < 1:
            raise DataError("group sizes must be positive and non-empty")
        for name in ("p_in", "p_out"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise DataError(f"{name} must lie in [0, 1]")


def planted_partition(spec: SynthSpec) -> tuple[Graph, GroupStructure]:
    """Sample a graph; edge probabilities are left unset for weighted-cascade assignment."""
    sizes = np.array(spec.group_sizes)
    n = int(sizes.sum())
    membership = np.repeat(np.arange(sizes.size), sizes)
    rng = np.random.default_rng(spec.seed)
    src: list[np.ndarray] = []
    dst: list[np.ndarray] = []
    for u in range(n):
        p = np.where(membership == membership[u], spec.p_in, spec.p_out)
        p[u] = 0.0
        hit = np.flatnonzero(rng.random(n) < p)
        src.append(np.full(hit.size, u, dtype=np.int64))
        dst.append(hit)
    sources, targets = np.concatenate(src), np.concatenate(dst)
    if sources.size == 0:
        raise DataError("synthetic graph settings produced a graph without edges")
    g = Graph(n, sources, targets, np.full(sources.size, UNSET))
    c = GroupStructure(membership, tuple(f"g{i}" for i in range(sizes.size)))
    return g, c


def split_sizes(n: int, fractions: Sequence[float]) -> tuple[int, ...]:
    """Round ``n * fraction`` per group, keeping the total at ``n`` and each group non-empty."""
    raw = np.array(fractions, dtype=float) / sum(fractions) * n
    sizes = np.maximum(np.floor(raw).astype(int), 1)
    while sizes.sum() < n:
        sizes[int(np.argmax(raw - sizes))] += 1
    while sizes.sum() > n:
        sizes[int(np.argmax(sizes))] -= 1
    return tuple(int(s) for s in sizes)
