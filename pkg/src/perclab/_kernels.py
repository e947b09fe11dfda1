"""Numba kernels for percolation sampling.

Edge states are pure functions of (sample key, canonical edge index) through
the same splitmix64 mixer as perclab.rng, so full-configuration union-find
sampling and lazy cluster exploration see identical configurations, and
raising the retention probability opens a superset of edges per fixed key.

The union-find uses rank union with path halving; cluster statistics (vertex
count |K| and touching-edge count |E(K)|) come from a second pass over the
edge list after unification.  Lazy BFS counts each touching edge once via an
epoch-stamped edge-seen array and may stop early at an edge- or vertex-count
cap (the capped statistics are exact lower bounds, which is all the tail
indicators need).
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
U64_STREAM = np.uint64(0xD1342543DE82EF95)
U64_M1 = np.uint64(0xBF58476D1CE4E5B9)
U64_M2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_UNIT = 2.0 ** -53


@njit(cache=True, nogil=True, inline="always")
def _mix2(key, counter):
    x = (counter + _ONE) * U64_STREAM
    x ^= key
    x += U64_GOLDEN
    x = (x ^ (x >> _S30)) * U64_M1
    x = (x ^ (x >> _S27)) * U64_M2
    return x ^ (x >> _S31)


@njit(cache=True, nogil=True, inline="always")
def _unit(key, counter):
    return (_mix2(key, counter) >> _S11) * _UNIT


@njit(cache=True, nogil=True)
def mix2_kernel(key, counter):
    """Exposed for cross-checking against perclab.rng.mix2."""
    return _mix2(np.uint64(key), np.uint64(counter))


# ---------------------------------------------------------------------------
# union-find over a full configuration


@njit(cache=True, nogil=True, inline="always")
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def config_labels_from_mask(n, eu, ev, open_mask):
    """Union-find labels plus per-root |K| and |E(K)| for a given bitmap."""
    m = len(eu)
    parent = np.arange(n, dtype=np.int32)
    rank = np.zeros(n, dtype=np.uint8)
    for j in range(m):
        if open_mask[j]:
            ru = _find(parent, eu[j])
            rv = _find(parent, ev[j])
            if ru != rv:
                if rank[ru] < rank[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                if rank[ru] == rank[rv]:
                    rank[ru] += 1
    labels = np.empty(n, dtype=np.int32)
    for v in range(n):
        labels[v] = _find(parent, v)
    sizes = np.zeros(n, dtype=np.int64)
    for v in range(n):
        sizes[labels[v]] += 1
    ecounts = np.zeros(n, dtype=np.int64)
    for j in range(m):
        ru = labels[eu[j]]
        rv = labels[ev[j]]
        ecounts[ru] += 1
        if rv != ru:
            ecounts[rv] += 1
    return labels, sizes, ecounts


@njit(cache=True, nogil=True)
def draw_open_mask(m, key, p):
    out = np.empty(m, dtype=np.bool_)
    for j in range(m):
        out[j] = _unit(key, np.uint64(j)) < p
    return out


# ---------------------------------------------------------------------------
# lazy cluster exploration


@njit(cache=True, nogil=True, inline="always")
def _bfs(indptr, indices, slot_edge, start, skey, p, edge_cap, size_cap,
         visited, edge_seen, queue, epoch):
    """Explore the open cluster of start; returns (|K|, |E(K)|) with early
    stop at the caps (0 disables a cap; capped values are lower bounds)."""
    head = 0
    tail = 0
    visited[start] = epoch
    queue[tail] = start
    tail += 1
    size = 1
    ecount = 0
    if size_cap > 0 and size >= size_cap:
        return size, ecount
    while head < tail:
        u = queue[head]
        head += 1
        for si in range(indptr[u], indptr[u + 1]):
            w = indices[si]
            eid = slot_edge[si]
            if edge_seen[eid] == epoch:
                continue
            edge_seen[eid] = epoch
            ecount += 1
            if edge_cap > 0 and ecount >= edge_cap:
                return size, ecount
            if visited[w] != epoch and _unit(skey, np.uint64(eid)) < p:
                visited[w] = epoch
                queue[tail] = w
                tail += 1
                size += 1
                if size_cap > 0 and size >= size_cap:
                    return size, ecount
    return size, ecount


@njit(cache=True, nogil=True)
def explore_stats_batch(indptr, indices, slot_edge, m, start, key, count, p,
                        edge_cap, size_cap):
    """Per-sample (|K_start|, |E(K_start)|), early-stopped at the caps."""
    n = len(indptr) - 1
    visited = np.zeros(n, dtype=np.int64)
    edge_seen = np.zeros(m, dtype=np.int64)
    queue = np.empty(n, dtype=np.int32)
    sizes = np.empty(count, dtype=np.int32)
    ecounts = np.empty(count, dtype=np.int32)
    for s in range(count):
        skey = _mix2(key, np.uint64(s))
        epoch = np.int64(s + 1)
        size, ecount = _bfs(indptr, indices, slot_edge, start, skey, p,
                            edge_cap, size_cap, visited, edge_seen, queue, epoch)
        sizes[s] = size
        ecounts[s] = ecount
    return sizes, ecounts


@njit(cache=True, nogil=True)
def membership_batch(indptr, indices, slot_edge, m, start, targets, key,
                     count, p):
    """Per-target counts of samples whose start-cluster contains the target."""
    n = len(indptr) - 1
    visited = np.zeros(n, dtype=np.int64)
    edge_seen = np.zeros(m, dtype=np.int64)
    queue = np.empty(n, dtype=np.int32)
    successes = np.zeros(len(targets), dtype=np.int64)
    for s in range(count):
        skey = _mix2(key, np.uint64(s))
        epoch = np.int64(s + 1)
        _bfs(indptr, indices, slot_edge, start, skey, p, 0, 0,
             visited, edge_seen, queue, epoch)
        for t in range(len(targets)):
            if visited[targets[t]] == epoch:
                successes[t] += 1
    return successes


@njit(cache=True, nogil=True)
def two_ghost_batch(indptr, indices, slot_edge, m, u0, v0, edge_id, key,
                    count, p, edge_cap, tree_mode):
    """Per-sample status for the closed-edge two-cluster event.

    status 0: the edge is open; 1: endpoints share a cluster; 2: candidate,
    with exact-or-capped touching-edge counts in (ecu, ecv).  On trees a
    closed edge always separates its endpoints, so exploration may stop at
    the cap; otherwise the first endpoint's cluster is explored in full to
    certify distinctness.
    """
    n = len(indptr) - 1
    visited = np.zeros(n, dtype=np.int64)
    edge_seen = np.zeros(m, dtype=np.int64)
    queue = np.empty(n, dtype=np.int32)
    status = np.zeros(count, dtype=np.int8)
    ecu = np.zeros(count, dtype=np.int32)
    ecv = np.zeros(count, dtype=np.int32)
    for s in range(count):
        skey = _mix2(key, np.uint64(s))
        if _unit(skey, np.uint64(edge_id)) < p:
            status[s] = 0
            continue
        epoch_u = np.int64(2 * s + 1)
        epoch_v = np.int64(2 * s + 2)
        if tree_mode:
            _, eu_count = _bfs(indptr, indices, slot_edge, u0, skey, p,
                               edge_cap, 0, visited, edge_seen, queue, epoch_u)
            _, ev_count = _bfs(indptr, indices, slot_edge, v0, skey, p,
                               edge_cap, 0, visited, edge_seen, queue, epoch_v)
            status[s] = 2
            ecu[s] = eu_count
            ecv[s] = ev_count
        else:
            _, eu_count = _bfs(indptr, indices, slot_edge, u0, skey, p,
                               0, 0, visited, edge_seen, queue, epoch_u)
            if visited[v0] == epoch_u:
                status[s] = 1
                continue
            _, ev_count = _bfs(indptr, indices, slot_edge, v0, skey, p,
                               0, 0, visited, edge_seen, queue, epoch_v)
            status[s] = 2
            ecu[s] = eu_count
            ecv[s] = ev_count
    return status, ecu, ecv
