"""Compiled inner loops for cascades, reverse-reachable sets and coverage updates.

All kernels take CSR adjacency arrays and a ``numpy.random.Generator``; coins
are drawn with ``gen.random() < p`` so an edge with ``p == 1`` always fires
and one with ``p == 0`` never does.
"""

import numpy as np
from numba import njit


@njit(nogil=True, cache=True)
def _grow(buf, need):
    cap = max(buf.size, 1)
    while cap < need:
        cap *= 2
    out = np.empty(cap, dtype=buf.dtype)
    out[: buf.size] = buf
    return out


@njit(nogil=True, cache=True)
def cascade(indptr, nbr, prob, seeds, gen, stamp, epoch, order, step_ends):
    """One IC run. Returns ``(n_active, n_steps)``; ``order[:n_active]`` lists
    activated nodes by step and ``step_ends[:n_steps]`` are the step boundaries."""
    count = 0
    for s in seeds:
        if stamp[s] != epoch:
            stamp[s] = epoch
            order[count] = s
            count += 1
    step_ends[0] = count
    n_steps = 1
    start = 0
    while start < count:
        end = count
        for i in range(start, end):
            u = order[i]
            for j in range(indptr[u], indptr[u + 1]):
                v = nbr[j]
                if stamp[v] != epoch:
                    if gen.random() < prob[j]:
                        stamp[v] = epoch
                        order[count] = v
                        count += 1
        start = end
        step_ends[n_steps] = count
        n_steps += 1
    return count, n_steps


@njit(nogil=True, cache=True)
def mc_group_counts(indptr, nbr, prob, seeds, membership, m, n_runs, gen):
    n = indptr.size - 1
    stamp = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    step_ends = np.empty(n + 2, dtype=np.int64)
    out = np.zeros((n_runs, m), dtype=np.int64)
    for r in range(n_runs):
        count, _ = cascade(indptr, nbr, prob, seeds, gen, stamp, r + 1, order, step_ends)
        for i in range(count):
            out[r, membership[order[i]]] += 1
    return out


@njit(nogil=True, cache=True)
def mc_node_counts(indptr, nbr, prob, seeds, n_runs, gen):
    n = indptr.size - 1
    stamp = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    step_ends = np.empty(n + 2, dtype=np.int64)
    hits = np.zeros(n, dtype=np.int64)
    for r in range(n_runs):
        count, _ = cascade(indptr, nbr, prob, seeds, gen, stamp, r + 1, order, step_ends)
        for i in range(count):
            hits[order[i]] += 1
    return hits


@njit(nogil=True, cache=True)
def rr_sets(indptr, src, prob, roots, gen):
    """Reverse BFS from every root. Returns ``(members, offsets)`` in CSR form."""
    n = indptr.size - 1
    stamp = np.zeros(n, dtype=np.int64)
    members = np.empty(max(4 * roots.size, 16), dtype=np.int64)
    offsets = np.empty(roots.size + 1, dtype=np.int64)
    size = 0
    offsets[0] = 0
    for r in range(roots.size):
        epoch = r + 1
        root = roots[r]
        if size + 1 > members.size:
            members = _grow(members, size + 1)
        stamp[root] = epoch
        members[size] = root
        head = size
        size += 1
        while head < size:
            v = members[head]
            head += 1
            for j in range(indptr[v], indptr[v + 1]):
                u = src[j]
                if stamp[u] != epoch:
                    if gen.random() < prob[j]:
                        stamp[u] = epoch
                        if size + 1 > members.size:
                            members = _grow(members, size + 1)
                        members[size] = u
                        size += 1
        offsets[r + 1] = size
    return members[:size].copy(), offsets


@njit(nogil=True, cache=True)
def rr_set_audit(indptr, src, prob, edge_ids, root, gen):
    """Single RR set that also returns the ids of every edge whose coin came up live."""
    n = indptr.size - 1
    seen = np.zeros(n, dtype=np.bool_)
    members = np.empty(n, dtype=np.int64)
    live = np.empty(edge_ids.size, dtype=np.int64)
    n_live = 0
    seen[root] = True
    members[0] = root
    size = 1
    head = 0
    while head < size:
        v = members[head]
        head += 1
        for j in range(indptr[v], indptr[v + 1]):
            u = src[j]
            if not seen[u]:
                if gen.random() < prob[j]:
                    seen[u] = True
                    members[size] = u
                    size += 1
                    live[n_live] = edge_ids[j]
                    n_live += 1
    return members[:size].copy(), live[:n_live].copy()


@njit(nogil=True, cache=True)
def cover_add(members, offsets, inv_indptr, inv_sets, covered, counts, v):
    """Mark every set containing ``v`` covered; keep ``counts`` (uncovered sets per node) in sync."""
    gain = 0
    for idx in range(inv_indptr[v], inv_indptr[v + 1]):
        j = inv_sets[idx]
        if not covered[j]:
            covered[j] = True
            gain += 1
            for t in range(offsets[j], offsets[j + 1]):
                counts[members[t]] -= 1
    return gain
