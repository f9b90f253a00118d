"""Graph and group-structure representation, ingestion and structural statistics.

Nodes are dense integers ``0 .. n-1``. The original identifiers read from input
files are kept in ``Graph.labels`` so results can be reported in the caller's
id space.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .errors import DataError, ParseError

logger = logging.getLogger(__name__)

UNSET = math.nan
"""Marker stored in ``Graph.probs`` for edges whose probability was not given."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed graph with one activation probability per edge.

    Edges are stored in input order (``sources[e] -> targets[e]`` with
    ``probs[e]``). Forward and reverse adjacency are CSR views over edge ids.
    """

    n: int
    sources: np.ndarray
    targets: np.ndarray
    probs: np.ndarray
    labels: tuple[str, ...] = ()
    out_indptr: np.ndarray = field(init=False, repr=False)
    out_edges: np.ndarray = field(init=False, repr=False)
    in_indptr: np.ndarray = field(init=False, repr=False)
    in_edges: np.ndarray = field(init=False, repr=False)
    in_degree: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = int(self.n)
        src = np.ascontiguousarray(self.sources, dtype=np.int64)
        dst = np.ascontiguousarray(self.targets, dtype=np.int64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if n < 0:
            raise DataError("node count must be non-negative")
        if not (src.shape == dst.shape == probs.shape) or src.ndim != 1:
            raise DataError("sources, targets and probs must be 1-d arrays of equal length")
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise DataError("edge endpoint out of range")
        if np.any(src == dst):
            raise DataError("self-loops are not allowed")
        known = probs[~np.isnan(probs)]
        if np.any((known < 0.0) | (known > 1.0)):
            raise DataError("edge probabilities must lie in [0, 1]")
        if src.size and np.unique(src * n + dst).size != src.size:
            raise DataError("duplicate edges are not allowed")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise DataError("labels must have one entry per node")

        out_edges = np.argsort(src, kind="stable")
        in_edges = np.argsort(dst, kind="stable")
        out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=out_indptr[1:])
        in_deg = np.bincount(dst, minlength=n).astype(np.int64)
        in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(in_deg, out=in_indptr[1:])

        set_ = object.__setattr__
        set_(self, "n", n)
        set_(self, "sources", _frozen(src))
        set_(self, "targets", _frozen(dst))
        set_(self, "probs", _frozen(probs))
        set_(self, "labels", labels)
        set_(self, "out_indptr", _frozen(out_indptr))
        set_(self, "out_edges", _frozen(out_edges.astype(np.int64)))
        set_(self, "in_indptr", _frozen(in_indptr))
        set_(self, "in_edges", _frozen(in_edges.astype(np.int64)))
        set_(self, "in_degree", _frozen(in_deg))

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence],
        n: int | None = None,
        labels: Sequence[str] | None = None,
        directed: bool = True,
    ) -> Graph:
        """Build a graph from ``(u, v)`` or ``(u, v, p)`` tuples over dense ids.

        Self-loops are dropped and duplicates collapsed (first probability
        wins). Undirected input materializes both directions.
        """
        src, dst, probs, _, _ = _clean_edges(edges, directed)
        if n is None:
            n = len(labels) if labels is not None else (max(max(src, default=-1), max(dst, default=-1)) + 1)
        return cls(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                   np.array(probs, dtype=np.float64), tuple(labels or ()))

    @property
    def edge_count(self) -> int:
        return int(self.sources.size)

    @property
    def has_unset_probabilities(self) -> bool:
        return bool(np.isnan(self.probs).any())

    def forward_adj(self, v: int) -> np.ndarray:
        """Edge ids leaving ``v``."""
        return self.out_edges[self.out_indptr[v]:self.out_indptr[v + 1]]

    def reverse_adj(self, v: int) -> np.ndarray:
        """Edge ids entering ``v``."""
        return self.in_edges[self.in_indptr[v]:self.in_indptr[v + 1]]

    def csr_forward(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, neighbor, prob)`` arrays of the forward adjacency."""
        return self.out_indptr, self.targets[self.out_edges], self.probs[self.out_edges]

    def csr_reverse(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, neighbor, prob)`` arrays of the reverse adjacency."""
        return self.in_indptr, self.sources[self.in_edges], self.probs[self.in_edges]

    def with_probabilities(self, probs: np.ndarray) -> Graph:
        return Graph(self.n, self.sources, self.targets, np.asarray(probs, dtype=np.float64), self.labels)

    def index_map(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def require_probabilities(self) -> None:
        if self.has_unset_probabilities:
            raise DataError("graph has edges without probabilities; call assign_wc_probabilities first")


def _clean_edges(edges: Iterable[Sequence], directed: bool):
    src: list[int] = []
    dst: list[int] = []
    probs: list[float] = []
    seen: set[tuple[int, int]] = set()
    self_loops = duplicates = 0
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        p = float(edge[2]) if len(edge) > 2 and edge[2] is not None else UNSET
        if u == v:
            self_loops += 1
            continue
        pairs = [(u, v)] if directed else [(u, v), (v, u)]
        for a, b in pairs:
            if (a, b) in seen:
                duplicates += 1
                continue
            seen.add((a, b))
            src.append(a)
            dst.append(b)
            probs.append(p)
    return src, dst, probs, self_loops, duplicates


def _relabel(tokens: list[str]) -> dict[str, int]:
    """Dense ids: numeric order when every id is an integer, else first appearance."""
    unique = list(dict.fromkeys(tokens))
    try:
        keyed = sorted(unique, key=lambda t: (int(t), t))
    except ValueError:
        keyed = unique
    return {tok: i for i, tok in enumerate(keyed)}


def load_edge_list(reader: TextIO | Iterable[str], directed: bool = True, source: str | None = None) -> Graph:
    """Parse a whitespace-separated edge list.

    Each non-comment line is ``u v`` or ``u v p``; a line holding a single id
    declares a node that may have no edges. Node ids are arbitrary tokens and
    are remapped to dense integers.
    """
    node_tokens: list[str] = []
    raw: list[tuple[str, str, float]] = []
    for lineno, line in enumerate(reader, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) == 1:
            node_tokens.append(parts[0])
            continue
        if len(parts) > 3:
            raise ParseError(f"expected 'u v [p]', got {len(parts)} fields", lineno, source)
        p = UNSET
        if len(parts) == 3:
            try:
                p = float(parts[2])
            except ValueError:
                raise ParseError(f"invalid probability {parts[2]!r}", lineno, source) from None
            if not 0.0 <= p <= 1.0:
                raise ParseError(f"probability {p} outside [0, 1]", lineno, source)
        node_tokens.extend(parts[:2])
        raw.append((parts[0], parts[1], p))
    if not node_tokens:
        raise ParseError("edge list is empty", None, source)

    ids = _relabel(node_tokens)
    src, dst, probs, self_loops, duplicates = _clean_edges(
        ((ids[u], ids[v], p) for u, v, p in raw), directed)
    if self_loops:
        logger.warning("dropped %d self-loop(s)%s", self_loops, f" in {source}" if source else "")
    if duplicates:
        logger.info("collapsed %d duplicate edge(s)", duplicates)
    labels = [None] * len(ids)
    for tok, i in ids.items():
        labels[i] = tok
    return Graph(len(ids), np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                 np.array(probs, dtype=np.float64), tuple(labels))


def assign_wc_probabilities(g: Graph) -> Graph:
    """Weighted cascade: every edge without a probability gets ``1 / in_degree(target)``."""
    probs = g.probs.copy()
    unset = np.isnan(probs)
    if unset.any():
        probs[unset] = 1.0 / g.in_degree[g.targets[unset]]
    return g.with_probabilities(probs)


@dataclass(frozen=True, eq=False)
class GroupStructure:
    """Partition of the nodes into ``m`` non-empty, disjoint groups."""

    membership: np.ndarray
    labels: tuple[str, ...] = ()
    members: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        membership = np.ascontiguousarray(self.membership, dtype=np.int64)
        if membership.ndim != 1:
            raise DataError("membership must be a 1-d array")
        m = int(membership.max()) + 1 if membership.size else 0
        if membership.size and membership.min() < 0:
            raise DataError("group indices must be non-negative")
        sizes = np.bincount(membership, minlength=m)
        if m == 0 or np.any(sizes == 0):
            raise DataError("every group index in [0, m) must have at least one member")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(m))
        if len(labels) != m:
            raise DataError("labels must have one entry per group")
        order = np.argsort(membership, kind="stable")
        bounds = np.concatenate(([0], np.cumsum(sizes)))
        members = tuple(_frozen(order[bounds[i]:bounds[i + 1]].astype(np.int64)) for i in range(m))
        object.__setattr__(self, "membership", _frozen(membership))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "members", members)

    @classmethod
    def single(cls, n: int) -> GroupStructure:
        """All ``n`` nodes in one group."""
        return cls(np.zeros(n, dtype=np.int64), ("all",))

    @classmethod
    def from_lists(cls, groups: Sequence[Iterable[int]], n: int | None = None) -> GroupStructure:
        lists = [list(g) for g in groups]
        total = sum(len(g) for g in lists)
        n = total if n is None else n
        membership = np.full(n, -1, dtype=np.int64)
        for gi, nodes in enumerate(lists):
            for v in nodes:
                if membership[v] != -1:
                    raise DataError(f"node {v} assigned to more than one group")
                membership[v] = gi
        if np.any(membership < 0):
            raise DataError(f"node {int(np.flatnonzero(membership < 0)[0])} has no group")
        return cls(membership)

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return int(self.membership.size)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(v) for v in self.members], dtype=np.int64)


def load_groups(reader: TextIO | Iterable[str], g: Graph, source: str | None = None) -> GroupStructure:
    """Parse ``node label`` lines; labels become group indices in first-appearance order."""
    index = g.index_map()
    membership = np.full(g.n, -1, dtype=np.int64)
    group_ids: dict[str, int] = {}
    for lineno, line in enumerate(reader, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'node label', got {len(parts)} fields", lineno, source)
        node, label = parts
        if node not in index:
            raise ParseError(f"unknown node id {node!r}", lineno, source)
        gid = group_ids.setdefault(label, len(group_ids))
        v = index[node]
        if membership[v] != -1 and membership[v] != gid:
            raise ParseError(f"node {node!r} labeled twice with different labels", lineno, source)
        membership[v] = gid
    missing = np.flatnonzero(membership < 0)
    if missing.size:
        raise DataError(f"node {g.labels[missing[0]]!r} has no group label")
    return GroupStructure(membership, tuple(group_ids))


@dataclass(frozen=True)
class GraphStats:
    rho: float
    group_sizes: tuple[int, ...]
    edge_count: int
    inner_edge_count: int
    cross_edge_count: int


def group_connectivity(g: Graph, c: GroupStructure) -> GraphStats:
    """Fraction of (directed, stored) edges whose endpoints lie in different groups."""
    if g.edge_count == 0:
        raise DataError("group connectivity is undefined for a graph without edges")
    if c.n != g.n:
        raise DataError("group structure does not match graph size")
    cross = int(np.count_nonzero(c.membership[g.sources] != c.membership[g.targets]))
    return GraphStats(
        rho=cross / g.edge_count,
        group_sizes=tuple(int(s) for s in c.sizes),
        edge_count=g.edge_count,
        inner_edge_count=g.edge_count - cross,
        cross_edge_count=cross,
    )


def write_edge_list(g: Graph, out: TextIO, with_probs: bool = False, declare_nodes: bool = True) -> None:
    if declare_nodes:
        for label in g.labels:
            out.write(f"{label}\n")
    for u, v, p in zip(g.sources.tolist(), g.targets.tolist(), g.probs.tolist()):
        if with_probs and not math.isnan(p):
            out.write(f"{g.labels[u]} {g.labels[v]} {p!r}\n")
        else:
            out.write(f"{g.labels[u]} {g.labels[v]}\n")


def write_groups(g: Graph, c: GroupStructure, out: TextIO) -> None:
    for v, gi in enumerate(c.membership.tolist()):
        out.write(f"{g.labels[v]} {c.labels[gi]}\n")
