"""Finite stand-in graphs: tori, regular-tree balls, lamplighter segments.

Vertex ids are dense 0-based integers.  Adjacency is stored CSR-style
(indptr/indices) with sorted neighbor lists, plus a canonical edge list
(u < v, lexicographically sorted) used by the percolation sampler; each
adjacency slot carries the canonical index of its edge.

Every family documents an *interior validity radius* per vertex: the largest
r such that the ball of radius r around the vertex, with its degrees, is
isomorphic to the corresponding ball of the infinite target graph.  Walk
operations that quote infinite-graph semantics check against it.

    torus dims [s_1..s_d]   target Z^d,              radius (min s_i - 1) // 2
    cycle [s]               target Z,                radius (s - 1) // 2
    tree_ball (d, r)        target d-regular tree,   radius r - depth(v)
    lamplighter_segment L   target Z_2 wr Z,         radius min(pos, L-1-pos)
    custom                  the graph itself is the object of study; no
                            boundary contamination applies (radius = inf)
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

MAX_VERTICES_ENV = "PERCLAB_MAX_VERTICES"
DEFAULT_MAX_VERTICES = 2_000_000


def vertex_cap() -> int:
    raw = os.environ.get(MAX_VERTICES_ENV)
    if raw is None:
        return DEFAULT_MAX_VERTICES
    try:
        return int(raw)
    except ValueError as exc:
        raise PreconditionError(f"{MAX_VERTICES_ENV} must be an integer, got {raw!r}") from exc


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple connected graph with degree measure pi(v) = deg(v)."""

    indptr: np.ndarray       # int64, len n+1
    indices: np.ndarray      # int32, sorted within each row
    edges_u: np.ndarray      # int32, canonical edge list, u < v, lex sorted
    edges_v: np.ndarray      # int32
    slot_edge: np.ndarray    # int32, canonical edge index per adjacency slot
    degrees: np.ndarray      # int64
    family: str              # torus | tree_ball | lamplighter_segment | cycle | custom
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.edges_u)

    def neighbors(self, v: int) -> np.ndarray:
        self.check_vertex(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        self.check_vertex(v)
        return int(self.degrees[v])

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise PreconditionError(f"vertex id {v} out of range [0, {self.n})")

    @property
    def pi_total(self) -> float:
        """Total stationary mass pi(V) = sum of degrees = 2|E|."""
        return float(2 * self.m)

    @property
    def reference_degree(self) -> int:
        """Common degree of the infinite target (interior degree for balls)."""
        if self.family in ("torus",):
            return 2 * len(self.params["dims"])
        if self.family == "cycle":
            return 2
        if self.family == "tree_ball":
            return int(self.params["degree"])
        if self.family == "lamplighter_segment":
            return 3
        raise PreconditionError(f"family {self.family!r} has no reference degree")

    def interior_radius(self, v: int) -> float:
        self.check_vertex(v)
        if self.family == "torus":
            return (min(self.params["dims"]) - 1) // 2
        if self.family == "cycle":
            return (self.params["dims"][0] - 1) // 2
        if self.family == "tree_ball":
            return self.params["radius"] - _tree_depth(
                v, self.params["degree"], self.params["radius"])
        if self.family == "lamplighter_segment":
            length = self.params["length"]
            pos = v % length
            return min(pos, length - 1 - pos)
        return math.inf

    def to_edge_list_text(self) -> str:
        lines = [f"vertices {self.n}"]
        lines.extend(f"{u} {v}" for u, v in zip(self.edges_u, self.edges_v))
        return "\n".join(lines) + "\n"


def _tree_depth(v: int, degree: int, radius: int) -> int:
    # ids are assigned level by level: 1, d, d(d-1), d(d-1)^2, ...
    if v == 0:
        return 0
    boundary = 1
    width = degree
    for depth in range(1, radius + 1):
        boundary += width
        if v < boundary:
            return depth
        width *= degree - 1
    raise PreconditionError(f"vertex id {v} outside tree ball")


def _assemble(n: int, pairs: np.ndarray, family: str, params: dict) -> Graph:
    """Build a Graph from an array of undirected edges (any orientation)."""
    if n > vertex_cap():
        raise PreconditionError(
            f"{n} vertices exceeds cap {vertex_cap()} (set {MAX_VERTICES_ENV} to raise)")
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) and (pairs.min() < 0 or pairs.max() >= n):
        raise PreconditionError("edge endpoint out of range")
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise PreconditionError("self-loops are not allowed")
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    if len(lo) > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
        raise PreconditionError("multi-edges are not allowed")
    m = len(lo)
    eids = np.arange(m, dtype=np.int64)
    du = np.concatenate([lo, hi])
    dv = np.concatenate([hi, lo])
    de = np.concatenate([eids, eids])
    order = np.lexsort((dv, du))
    indices = dv[order].astype(np.int32)
    slot_edge = de[order].astype(np.int32)
    counts = np.bincount(du, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    g = Graph(
        indptr=indptr,
        indices=indices,
        edges_u=lo.astype(np.int32),
        edges_v=hi.astype(np.int32),
        slot_edge=slot_edge,
        degrees=counts.astype(np.int64),
        family=family,
        params=params,
    )
    if not _is_connected(g):
        raise PreconditionError("graph is not connected")
    return g


def _is_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    if g.m == 0:
        return False
    return int((distances_from(g, 0) >= 0).sum()) == g.n


# ---------------------------------------------------------------------------
# builders


def build_torus(dims: list[int]) -> Graph:
    """Cartesian product of cycles; one dim gives a plain cycle.

    Vertex ids encode coordinates in row-major order (last dim fastest).
    """
    dims = [int(s) for s in dims]
    if not 1 <= len(dims) <= 4:
        raise PreconditionError("torus needs 1 to 4 dimensions")
    if any(s < 3 for s in dims):
        raise PreconditionError("torus sides must be >= 3 (shorter sides create multi-edges)")
    n = math.prod(dims)
    coords = np.indices(dims).reshape(len(dims), -1)
    strides = np.array([math.prod(dims[i + 1:]) for i in range(len(dims))], dtype=np.int64)
    ids = strides @ coords
    pair_blocks = []
    for axis, side in enumerate(dims):
        shifted = coords.copy()
        shifted[axis] = (coords[axis] + 1) % side
        pair_blocks.append(np.stack([ids, strides @ shifted], axis=1))
    family = "cycle" if len(dims) == 1 else "torus"
    return _assemble(n, np.concatenate(pair_blocks), family, {"dims": dims})


def build_cycle(n: int) -> Graph:
    return build_torus([n])


def build_tree_ball(degree: int, radius: int) -> Graph:
    """Ball of the given radius in the d-regular tree, rooted at id 0.

    Interior vertices have degree d, boundary vertices degree 1.  Ids are
    assigned level by level, children consecutively per parent.
    """
    if degree < 3:
        raise PreconditionError("tree degree must be >= 3")
    if radius < 1:
        raise PreconditionError("tree radius must be >= 1")
    level_sizes = [1, degree]
    for _ in range(2, radius + 1):
        level_sizes.append(level_sizes[-1] * (degree - 1))
    level_sizes = level_sizes[:radius + 1]
    n = sum(level_sizes)
    if n > vertex_cap():
        raise PreconditionError(
            f"tree ball has {n} vertices, exceeding cap {vertex_cap()}")
    pair_blocks = []
    offset = 0
    for depth in range(radius):
        parents = np.arange(offset, offset + level_sizes[depth], dtype=np.int64)
        fanout = degree if depth == 0 else degree - 1
        children_start = offset + level_sizes[depth]
        children = np.arange(
            children_start, children_start + level_sizes[depth + 1], dtype=np.int64)
        pair_blocks.append(np.stack([np.repeat(parents, fanout), children], axis=1))
        offset += level_sizes[depth]
    return _assemble(n, np.concatenate(pair_blocks), "tree_ball",
                     {"degree": degree, "radius": radius})


def build_lamplighter_segment(length: int) -> Graph:
    """Finite window of the lamplighter walk: states (lamps in {0,1}^L, pos).

    Edges toggle the lamp at the walker's position or move the walker by one
    (moves that would leave the segment are absent, keeping the graph simple).
    Vertex id = lamp_bits * L + pos.
    """
    if not 1 <= length <= 20:
        raise PreconditionError("lamplighter segment length must be in [1, 20]")
    n = length * (1 << length)
    if n > vertex_cap():
        raise PreconditionError(
            f"lamplighter segment has {n} states, exceeding cap {vertex_cap()}")
    bits = np.arange(1 << length, dtype=np.int64)
    pair_blocks = []
    for pos in range(length):
        ids = bits * length + pos
        lamp_off = bits[(bits >> pos) & 1 == 0]
        pair_blocks.append(np.stack(
            [lamp_off * length + pos, (lamp_off ^ (1 << pos)) * length + pos], axis=1))
        if pos + 1 < length:
            pair_blocks.append(np.stack([ids, ids + 1], axis=1))
    return _assemble(n, np.concatenate(pair_blocks), "lamplighter_segment",
                     {"length": length})


def build_path(n: int) -> Graph:
    """Path graph on n vertices (family custom); handy as a test subject."""
    if n < 1:
        raise PreconditionError("path needs at least one vertex")
    ids = np.arange(n - 1, dtype=np.int64)
    return _assemble(n, np.stack([ids, ids + 1], axis=1), "custom", {"kind": "path", "n": n})


# ---------------------------------------------------------------------------
# serialization: first line "vertices <n>", then "u v" per edge, u < v,
# sorted lexicographically; round-trips bit-exactly.


def dump_graph(g: Graph) -> str:
    return g.to_edge_list_text()


def load_graph(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vertices "):
        raise PreconditionError('edge list must start with "vertices <n>"')
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise PreconditionError("malformed vertex count line") from exc
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise PreconditionError(f"malformed edge line: {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise PreconditionError(f"edge lines must have u < v, got {ln!r}")
        pairs.append((u, v))
    return _assemble(n, np.array(pairs, dtype=np.int64).reshape(-1, 2), "custom", {})


# ---------------------------------------------------------------------------
# domains, distances, balls


@dataclass(frozen=True, eq=False)
class Domain:
    """A vertex subset: sorted member ids plus an O(1) membership mask."""

    members: np.ndarray  # int64, sorted, distinct
    mask: np.ndarray     # bool, length n

    @classmethod
    def from_vertices(cls, g: Graph, vertices) -> "Domain":
        members = np.unique(np.asarray(list(vertices), dtype=np.int64))
        if len(members) and (members[0] < 0 or members[-1] >= g.n):
            raise PreconditionError("domain member out of range")
        mask = np.zeros(g.n, dtype=bool)
        mask[members] = True
        return cls(members=members, mask=mask)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "Domain":
        mask = np.asarray(mask, dtype=bool)
        return cls(members=np.flatnonzero(mask).astype(np.int64), mask=mask)

    @classmethod
    def full(cls, g: Graph) -> "Domain":
        return cls.from_mask(np.ones(g.n, dtype=bool))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return bool(self.mask[v])


def pi_mass(g: Graph, D: Domain) -> float:
    """pi(D) = sum of degrees over the domain."""
    return float(g.degrees[D.members].sum())


def _gather_neighbors(g: Graph, frontier: np.ndarray) -> np.ndarray:
    starts = g.indptr[frontier]
    counts = g.indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(np.cumsum(counts) - counts, counts)
    flat = np.repeat(starts, counts) + (np.arange(total) - offsets)
    return g.indices[flat].astype(np.int64)


def distances_from(g: Graph, source: int, cutoff: int | None = None) -> np.ndarray:
    """BFS distances from source; -1 marks vertices beyond the cutoff."""
    g.check_vertex(source)
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while len(frontier) and (cutoff is None or d < cutoff):
        nbrs = _gather_neighbors(g, frontier)
        fresh = nbrs[dist[nbrs] < 0]
        if len(fresh) == 0:
            break
        frontier = np.unique(fresh)
        d += 1
        dist[frontier] = d
    return dist


def graph_distance(g: Graph, u: int, v: int) -> int:
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        return 0
    dist = distances_from(g, u)
    if dist[v] < 0:
        raise PreconditionError("vertices are not connected")
    return int(dist[v])


def ball(g: Graph, v: int, r: int) -> Domain:
    """Closed ball {u : d(v, u) <= r}."""
    if r < 0:
        raise PreconditionError("ball radius must be >= 0")
    dist = distances_from(g, v, cutoff=r)
    return Domain.from_mask(dist >= 0)


def neighbors(g: Graph, v: int) -> np.ndarray:
    return g.neighbors(v)


def diameter(g: Graph) -> int:
    """Exact diameter by BFS from every vertex (small graphs only)."""
    return max(int(distances_from(g, v).max()) for v in range(g.n))
