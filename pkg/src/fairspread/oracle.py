"""Brute-force ground truth for tiny graphs.

Every live-edge graph is enumerated explicitly. When all edge probabilities
are simple fractions the computation is exact: each live-edge graph gets an
integer weight over the common denominator ``D = prod(den(p_e))`` and all
spreads are returned as ``fractions.Fraction``. Otherwise doubles are used.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapExceededError, DataError
from .graph import Graph, GroupStructure

EDGE_CAP = 16
SUBSET_CAP = 50_000
NODE_CAP = 62
TABLE_CAP = 1 << 23
FLOAT_TOL = 1e-9
MAX_DENOMINATOR = 10**6

Number = Fraction | float


@dataclass(frozen=True)
class ExactValue:
    value: Number
    enumeration_size: int

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class OptimalResult:
    best_set: tuple[int, ...]
    best_phi: ExactValue
    evaluated_subsets: int


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of an exhaustive or sampled property check."""

    checked: int
    violations: int
    worst_margin: Number

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _rationalize(probs: np.ndarray) -> list[Fraction] | None:
    out = []
    for p in probs.tolist():
        f = Fraction(p).limit_denominator(MAX_DENOMINATOR)
        if float(f) != p:
            return None
        out.append(f)
    return out


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


class LiveEdgeEnumeration:
    """All ``2**|E|`` live-edge graphs of ``g`` with weights and reach bitmasks.

    ``reach[L, v]`` is the bitmask of nodes reachable from ``v`` in live-edge
    graph ``L``.
    """

    def __init__(self, g: Graph, edge_cap: int = EDGE_CAP, exact: bool | None = None):
        g.require_probabilities()
        if g.edge_count > edge_cap:
            raise CapExceededError(
                f"graph has {g.edge_count} edges; exact enumeration is capped at {edge_cap} "
                "(use the Monte Carlo estimators instead)")
        if g.n > NODE_CAP:
            raise CapExceededError(f"graph has {g.n} nodes; exact enumeration supports at most {NODE_CAP}")
        self.g = g
        n, n_edges = g.n, g.edge_count
        self.size = 1 << n_edges
        masks = np.arange(self.size, dtype=np.int64)
        kept = ((masks[:, None] >> np.arange(n_edges, dtype=np.int64)) & 1).astype(bool)

        fracs = _rationalize(g.probs) if exact in (None, True) else None
        if exact and fracs is None:
            raise DataError("probabilities are not simple fractions; exact mode unavailable")
        if fracs is not None:
            denominator = math.prod(f.denominator for f in fracs)
            dtype = np.int64 if denominator * (n + 1) < 2**62 else object
            weights = np.ones(self.size, dtype=dtype)
            for e, f in enumerate(fracs):
                on, off = f.numerator, f.denominator - f.numerator
                weights = weights * np.where(kept[:, e], on, off).astype(dtype)
            self.denominator: int | None = denominator
        else:
            weights = np.prod(np.where(kept, g.probs, 1.0 - g.probs), axis=1)
            self.denominator = None
        self.weights = weights

        reach = np.broadcast_to(np.int64(1) << np.arange(n, dtype=np.int64), (self.size, n)).copy()
        src, dst = g.sources.tolist(), g.targets.tolist()
        changed = True
        while changed:
            changed = False
            for e in range(n_edges):
                u, v = src[e], dst[e]
                new = reach[:, u] | np.where(kept[:, e], reach[:, v], 0)
                if np.any(new != reach[:, u]):
                    reach[:, u] = new
                    changed = True
        self.reach = reach

    @property
    def exact(self) -> bool:
        return self.denominator is not None

    def total_probability(self) -> Number:
        return self._value(self.weights.sum())

    def _value(self, numerator, scale: int = 1) -> Number:
        if self.denominator is not None:
            return Fraction(int(numerator), self.denominator * scale)
        return float(numerator) / scale

    def gamma(self, seeds: Iterable[int]) -> np.ndarray:
        """Bitmask of nodes reachable from ``seeds`` in each live-edge graph."""
        out = np.zeros(self.size, dtype=np.int64)
        for s in seeds:
            out |= self.reach[:, int(s)]
        return out

    def expect(self, counts: np.ndarray):
        """Weighted sum of per-live-edge-graph counts, as a raw numerator (or float)."""
        if self.denominator is not None:
            return int(np.dot(self.weights, counts.astype(self.weights.dtype)))
        return float(np.dot(self.weights, counts))

    def subset_table(self, group_masks: Sequence[int]) -> np.ndarray:
        """Numerators of ``sigma_c(S)`` for every subset bitmask ``S`` and group, shape ``(2**n, m)``."""
        n = self.g.n
        if (1 << n) * self.size > TABLE_CAP:
            raise CapExceededError("subset table too large for exhaustive checks")
        gam = np.zeros((1 << n, self.size), dtype=np.int64)
        for s in range(1, 1 << n):
            low = s & -s
            gam[s] = gam[s ^ low] | self.reach[:, low.bit_length() - 1]
        dtype = self.weights.dtype if self.denominator is not None else np.float64
        table = np.empty((1 << n, len(group_masks)), dtype=dtype)
        for ci, mask in enumerate(group_masks):
            counts = _popcount(gam & np.int64(mask)).astype(dtype)
            table[:, ci] = counts @ self.weights
        return table


def _group_masks(g: Graph, c: GroupStructure | None) -> list[int]:
    if c is None:
        return [(1 << g.n) - 1]
    if c.n != g.n:
        raise DataError("group structure does not match graph size")
    return [sum(1 << int(v) for v in members) for members in c.members]


def _check_seeds(g: Graph, seeds: Iterable[int]) -> list[int]:
    seeds = [int(s) for s in seeds]
    if any(s < 0 or s >= g.n for s in seeds):
        raise DataError("seed node id out of range")
    return seeds


def exact_sigma(
    g: Graph,
    seeds: Iterable[int],
    members: Iterable[int] | None = None,
    enum: LiveEdgeEnumeration | None = None,
) -> ExactValue:
    """Expected number of activated nodes, optionally counted only inside ``members``."""
    enum = enum or LiveEdgeEnumeration(g)
    gam = enum.gamma(_check_seeds(g, seeds))
    if members is not None:
        gam &= np.int64(sum(1 << int(v) for v in members))
    return ExactValue(enum._value(enum.expect(_popcount(gam))), enum.size)


def exact_group_sigmas(
    g: Graph, c: GroupStructure, seeds: Iterable[int], enum: LiveEdgeEnumeration | None = None
) -> tuple[ExactValue, ...]:
    enum = enum or LiveEdgeEnumeration(g)
    gam = enum.gamma(_check_seeds(g, seeds))
    return tuple(ExactValue(enum._value(enum.expect(_popcount(gam & np.int64(mask)))), enum.size)
                 for mask in _group_masks(g, c))


def exact_utilities(
    g: Graph, c: GroupStructure, seeds: Iterable[int], enum: LiveEdgeEnumeration | None = None
) -> tuple[Number, ...]:
    sigmas = exact_group_sigmas(g, c, seeds, enum)
    if sigmas and sigmas[0].exact:
        return tuple(s.value / int(size) for s, size in zip(sigmas, c.sizes))
    return tuple(float(s.value) / int(size) for s, size in zip(sigmas, c.sizes))


def exact_phi(g: Graph, c: GroupStructure, seeds: Iterable[int], enum: LiveEdgeEnumeration | None = None) -> ExactValue:
    enum = enum or LiveEdgeEnumeration(g)
    return ExactValue(min(exact_utilities(g, c, seeds, enum)), enum.size)


def exact_size_distribution(g: Graph, seeds: Iterable[int], enum: LiveEdgeEnumeration | None = None) -> dict[int, Number]:
    """Exact distribution of the number of activated nodes."""
    enum = enum or LiveEdgeEnumeration(g)
    sizes = _popcount(enum.gamma(_check_seeds(g, seeds)))
    return {int(s): enum._value(enum.weights[sizes == s].sum()) for s in np.unique(sizes)}


def exact_optimum(
    g: Graph,
    c: GroupStructure,
    k: int,
    subset_cap: int = SUBSET_CAP,
    enum: LiveEdgeEnumeration | None = None,
) -> OptimalResult:
    """Best size-``k`` seed set by exhaustive search; ties keep the lexicographically smallest set."""
    if not 0 <= k <= g.n:
        raise DataError(f"budget k={k} outside [0, {g.n}]")
    n_subsets = math.comb(g.n, k)
    if n_subsets > subset_cap:
        raise CapExceededError(f"C({g.n},{k}) = {n_subsets} subsets exceeds the cap of {subset_cap}")
    enum = enum or LiveEdgeEnumeration(g)
    masks = _group_masks(g, c)
    sizes = [int(s) for s in c.sizes]
    best: tuple[int, ...] = ()
    best_phi: Number | None = None
    for subset in itertools.combinations(range(g.n), k):
        gam = enum.gamma(subset)
        phi = min(enum._value(enum.expect(_popcount(gam & np.int64(mask))), size)
                  for mask, size in zip(masks, sizes))
        if best_phi is None or phi > best_phi:
            best, best_phi = subset, phi
    return OptimalResult(best, ExactValue(best_phi, enum.size), n_subsets)


@lru_cache(maxsize=16)
def _exhaustive_triples(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ss, ts, vs = [], [], []
    for t in range(1 << n):
        outside = [v for v in range(n) if not t >> v & 1]
        s = t
        while True:
            for v in outside:
                ss.append(s)
                ts.append(t)
                vs.append(v)
            if s == 0:
                break
            s = (s - 1) & t
    return np.array(ss, dtype=np.int64), np.array(ts, dtype=np.int64), np.array(vs, dtype=np.int64)


def _sampled_triples(n: int, count: int, rng: np.random.Generator):
    ss, ts, vs = [], [], []
    while len(ss) < count:
        t = int(rng.integers(0, 1 << n))
        outside = [v for v in range(n) if not t >> v & 1]
        if not outside:
            continue
        s = t & int(rng.integers(0, 1 << n))
        ss.append(s)
        ts.append(t)
        vs.append(outside[int(rng.integers(0, len(outside)))])
    return np.array(ss, dtype=np.int64), np.array(ts, dtype=np.int64), np.array(vs, dtype=np.int64)


def _report(enum: LiveEdgeEnumeration, margins: np.ndarray) -> PropertyReport:
    if margins.size == 0:
        return PropertyReport(0, 0, enum._value(0))
    if enum.exact:
        violations = int(np.count_nonzero(margins < 0))
    else:
        violations = int(np.count_nonzero(margins < -FLOAT_TOL))
    return PropertyReport(int(margins.size), violations, enum._value(margins.min()))


def check_submodularity(
    g: Graph,
    c: GroupStructure | None = None,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
    enum: LiveEdgeEnumeration | None = None,
) -> PropertyReport:
    """Check ``f(S+v) - f(S) >= f(T+v) - f(T)`` for ``f = sigma_c`` of every group.

    With ``samples=None`` every triple ``S ⊆ T, v ∉ T`` is checked; otherwise
    ``samples`` random triples are drawn from ``rng``. ``c=None`` checks the
    whole-graph spread.
    """
    enum = enum or LiveEdgeEnumeration(g)
    table = enum.subset_table(_group_masks(g, c))
    if samples is None:
        s, t, v = _exhaustive_triples(g.n)
    else:
        s, t, v = _sampled_triples(g.n, samples, rng if rng is not None else np.random.default_rng())
    bit = np.int64(1) << v
    margins = (table[s | bit] - table[s]) - (table[t | bit] - table[t])
    return _report(enum, margins.ravel())


def check_monotonicity(
    g: Graph, c: GroupStructure | None = None, enum: LiveEdgeEnumeration | None = None
) -> PropertyReport:
    """Exhaustively check ``sigma_c(S) >= 0`` and ``sigma_c(S + v) >= sigma_c(S)`` for every group."""
    enum = enum or LiveEdgeEnumeration(g)
    table = enum.subset_table(_group_masks(g, c))
    n = g.n
    subsets = np.arange(1 << n, dtype=np.int64)
    deltas = [table[subsets | (np.int64(1) << v)] - table[subsets] for v in range(n)]
    margins = np.concatenate([table.ravel()] + [d.ravel() for d in deltas])
    return _report(enum, margins)
