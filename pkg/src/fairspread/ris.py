"""Reverse influence sampling: per-group RR-set pools, IMM sample sizes and greedy max-cover.

A pool for group ``c`` holds RR sets whose roots are drawn uniformly from
``V_c``. The fraction of sets hit by a seed set ``S`` is an unbiased estimate
of ``u_c(S) = sigma_c(S) / |V_c|``.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import _kernels
from .errors import BudgetError, DataError
from .graph import Graph, GroupStructure
from .streams import CHUNK_SIZE, SeedLike, as_seed_sequence, generator, map_chunks

ONE_MINUS_INV_E = 1.0 - 1.0 / math.e


@dataclass(frozen=True)
class ImmParams:
    """IMM accuracy knobs plus sample-size overrides.

    ``theta_override`` fixes every pool size and skips the sampling phase.
    """

    epsilon: float = 0.1
    ell: float = 1.0
    theta_override: int | None = None
    theta_min: int = 1000
    theta_max: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.ell <= 0:
            raise ValueError("ell must be positive")
        if self.theta_override is not None and self.theta_override < 1:
            raise ValueError("theta_override must be >= 1")
        if self.theta_min < 1:
            raise ValueError("theta_min must be >= 1")


@dataclass(frozen=True)
class RRSet:
    root: int
    members: frozenset[int]


@dataclass(frozen=True, eq=False)
class RRSetPool:
    """RR sets in CSR form plus the inverted node -> set index."""

    group: int
    n: int
    group_size: int
    roots: np.ndarray
    members: np.ndarray
    offsets: np.ndarray
    inv_indptr: np.ndarray = field(init=False, repr=False)
    inv_sets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        theta = self.roots.size
        if self.offsets.size != theta + 1 or self.offsets[0] != 0 or self.offsets[-1] != self.members.size:
            raise DataError("RR pool offsets are inconsistent with its members")
        sizes = np.diff(self.offsets)
        if theta and np.any(self.members[self.offsets[:-1]] != self.roots):
            raise DataError("every RR set must start with its root")
        set_ids = np.repeat(np.arange(theta, dtype=np.int64), sizes)
        order = np.argsort(self.members, kind="stable")
        inv_indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.members, minlength=self.n), out=inv_indptr[1:])
        object.__setattr__(self, "inv_indptr", inv_indptr)
        object.__setattr__(self, "inv_sets", set_ids[order])

    @property
    def theta(self) -> int:
        return int(self.roots.size)

    def __len__(self) -> int:
        return self.theta

    def set_members(self, j: int) -> np.ndarray:
        return self.members[self.offsets[j]:self.offsets[j + 1]]

    def sets_containing(self, v: int) -> np.ndarray:
        return self.inv_sets[self.inv_indptr[v]:self.inv_indptr[v + 1]]

    def __iter__(self):
        for j in range(self.theta):
            yield RRSet(int(self.roots[j]), frozenset(self.set_members(j).tolist()))

    def covered_mask(self, seeds: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.theta, dtype=bool)
        for v in seeds:
            mask[self.sets_containing(int(v))] = True
        return mask

    def to_json(self, labels: Sequence[str] | None = None) -> dict:
        name = (lambda v: labels[v]) if labels is not None else int
        return {
            "group": self.group,
            "theta": self.theta,
            "group_size": self.group_size,
            "roots": [name(int(r)) for r in self.roots],
            "sets": [[name(int(v)) for v in self.set_members(j)] for j in range(self.theta)],
        }

    def dump(self, out: TextIO, labels: Sequence[str] | None = None) -> None:
        json.dump(self.to_json(labels), out)


def generate_rr_set(g: Graph, root: int, rng: np.random.Generator, audit: bool = False):
    """One RR set rooted at ``root``.

    With ``audit=True`` returns ``(RRSet, live_edge_ids)`` where the edge ids are
    the coins that came up live while building the set.
    """
    g.require_probabilities()
    if not 0 <= root < g.n:
        raise DataError("root out of range")
    indptr, src, prob = g.csr_reverse()
    if audit:
        members, live = _kernels.rr_set_audit(indptr, src, prob, g.in_edges, int(root), rng)
        return RRSet(int(root), frozenset(members.tolist())), live
    members, _ = _kernels.rr_sets(indptr, src, prob, np.array([root], dtype=np.int64), rng)
    return RRSet(int(root), frozenset(members.tolist()))


class RRStream:
    """Lazily generated, prefix-consistent sequence of RR sets rooted in one group.

    Chunk ``i`` always draws from substream ``(tag, group, i)``, so the first
    ``theta`` sets are identical however large the stream eventually grows and
    however many threads build it.
    """

    def __init__(self, g: Graph, c: GroupStructure, group: int, seed: SeedLike = None,
                 tag: str = "rr", threads: int | None = None):
        g.require_probabilities()
        if not 0 <= group < c.m:
            raise DataError(f"group index {group} out of range")
        self.g, self.c, self.group, self.tag, self.threads = g, c, group, tag, threads
        self.root = as_seed_sequence(seed)
        self.roots_pool = c.members[group]
        if self.roots_pool.size == 0:
            raise DataError("cannot sample RR sets for an empty group")
        self._csr = g.csr_reverse()
        self._chunks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def _chunk(self, i: int):
        gen = generator(self.root, self.tag, self.group, i)
        roots = self.roots_pool[gen.integers(0, self.roots_pool.size, CHUNK_SIZE)]
        members, offsets = _kernels.rr_sets(*self._csr, roots, gen)
        return roots, members, offsets

    def pool(self, theta: int) -> RRSetPool:
        if theta < 1:
            raise DataError("theta must be >= 1")
        need = -(-theta // CHUNK_SIZE)
        have = len(self._chunks)
        if need > have:
            self._chunks.extend(map_chunks(lambda i: self._chunk(have + i), need - have, self.threads))
        roots = np.concatenate([ch[0] for ch in self._chunks[:need]])[:theta]
        parts, offsets, base = [], [np.zeros(1, dtype=np.int64)], 0
        for _, members, offs in self._chunks[:need]:
            parts.append(members)
            offsets.append(offs[1:] + base)
            base += members.size
        offsets = np.concatenate(offsets)[: theta + 1]
        members = np.concatenate(parts)[: offsets[-1]]
        if np.any(self.c.membership[roots] != self.group):
            raise DataError("RR root outside its group")
        return RRSetPool(self.group, self.g.n, int(self.roots_pool.size), roots, members, offsets)


def build_group_pool(g: Graph, c: GroupStructure, group: int, theta: int, seed: SeedLike = None,
                     threads: int | None = None, tag: str = "rr") -> RRSetPool:
    return RRStream(g, c, group, seed, tag, threads).pool(theta)


@dataclass(frozen=True)
class GreedyResult:
    seeds: tuple[int, ...]
    gains: tuple[int, ...]
    covered: int


def greedy_max_cover(pool: RRSetPool, k: int) -> GreedyResult:
    """Pick ``k`` nodes, each covering the most not-yet-covered sets (smallest id on ties).

    Candidates are all graph nodes. Once every gain is zero the remaining picks
    are the smallest unused ids.
    """
    if k < 1:
        raise BudgetError("budget k must be >= 1")
    if k > pool.n:
        raise BudgetError(f"budget k={k} exceeds the number of nodes {pool.n}")
    counts = np.diff(pool.inv_indptr)
    covered = np.zeros(pool.theta, dtype=np.bool_)
    seeds, gains = [], []
    for _ in range(k):
        v = int(np.argmax(counts))
        gain = _kernels.cover_add(pool.members, pool.offsets, pool.inv_indptr, pool.inv_sets, covered, counts, v)
        counts[v] = -1
        seeds.append(v)
        gains.append(int(gain))
    return GreedyResult(tuple(seeds), tuple(gains), int(sum(gains)))


def coverage_utility(pool: RRSetPool, seeds: Iterable[int]) -> float:
    """Fraction of the pool's RR sets hit by ``seeds``."""
    return int(np.count_nonzero(pool.covered_mask(seeds))) / pool.theta


class PoolCoverage:
    """Incremental coverage state of one pool under a growing seed set."""

    def __init__(self, pool: RRSetPool):
        self.pool = pool
        self.covered = np.zeros(pool.theta, dtype=np.bool_)
        self.counts = np.diff(pool.inv_indptr)
        self.n_covered = 0

    def gain(self, v: int) -> int:
        """Sets newly covered if ``v`` were added."""
        return int(self.counts[v])

    def add(self, v: int) -> int:
        p = self.pool
        gain = _kernels.cover_add(p.members, p.offsets, p.inv_indptr, p.inv_sets, self.covered, self.counts, int(v))
        self.n_covered += gain
        return gain

    @property
    def utility(self) -> float:
        return self.n_covered / self.pool.theta

    def utility_with(self, v: int) -> float:
        return (self.n_covered + int(self.counts[v])) / self.pool.theta

    def utilities_with_all(self) -> np.ndarray:
        """Utility after adding each node, for every node at once."""
        return (self.n_covered + self.counts) / self.pool.theta


def log_binom(n: int, k: int) -> float:
    k = min(k, n)
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def theta_for_bound(group_size: int, k: int, epsilon: float, ell: float, opt_lower_bound: float) -> float:
    """RR sets needed for a (1 - 1/e - eps) guarantee w.p. 1 - 1/|V_c|^ell given ``OPT_c >= opt_lower_bound``."""
    n = group_size
    ln_n = math.log(n)
    alpha = ONE_MINUS_INV_E * math.sqrt(ell * ln_n + math.log(4))
    beta = math.sqrt(ONE_MINUS_INV_E * (log_binom(n, k) + ell * ln_n + math.log(4)))
    return 2.0 * n * (alpha + beta) ** 2 / (opt_lower_bound * epsilon**2)


def opt_lower_bound(stream: RRStream, k: int, params: ImmParams) -> float:
    """IMM sampling phase: halve a guess of ``OPT_c`` until greedy coverage certifies it."""
    n = int(stream.roots_pool.size)
    eps_p = math.sqrt(2.0) * params.epsilon
    log2n = math.log2(n) if n > 1 else 0.0
    lam_p = ((2.0 + 2.0 / 3.0 * eps_p)
             * (log_binom(n, k) + params.ell * math.log(n) + math.log(max(log2n, 1.0)))
             * n / eps_p**2)
    for i in range(1, math.floor(log2n)):
        x = n / 2.0**i
        theta_i = math.ceil(lam_p / x)
        if params.theta_max is not None:
            theta_i = min(theta_i, params.theta_max)
        pool = stream.pool(theta_i)
        estimate = n * greedy_max_cover(pool, k).covered / pool.theta
        if estimate >= (1.0 + eps_p) * x:
            return estimate / (1.0 + eps_p)
    return 1.0


def compute_theta(g: Graph, c: GroupStructure, group: int, k: int, params: ImmParams = ImmParams(),
                  seed: SeedLike = None, threads: int | None = None) -> int:
    """Pool size for group ``group``: the override if set, else the IMM bound floored at ``theta_min``."""
    if k > g.n:
        raise BudgetError(f"budget k={k} exceeds the number of nodes {g.n}")
    if params.theta_override is not None:
        return int(params.theta_override)
    stream = RRStream(g, c, group, seed, "rr-lb", threads)
    lb = opt_lower_bound(stream, k, params)
    theta = math.ceil(theta_for_bound(int(c.sizes[group]), k, params.epsilon, params.ell, lb))
    theta = max(theta, params.theta_min)
    if params.theta_max is not None:
        theta = min(theta, params.theta_max)
    return int(theta)
