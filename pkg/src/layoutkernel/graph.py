"""Graph representation, edge-list parsing, and induced-subgraph extraction.

Graphs are simple and undirected: no self loops, no duplicate edges,
symmetric adjacency. Vertices are dense 0-based integers; original labels
from parsed files are kept in a sidecar tuple. Instances are immutable by
convention after construction and safe to share across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs or invalid graph operations."""


class ParseError(GraphError):
    """Raised when an edge-list source cannot be parsed."""


# Fixed lexicographic order of unordered vertex pairs per small-graph size k:
# (0,1),(0,2),...,(0,k-1),(1,2),... Bit i of SmallGraph.bits corresponds to
# PAIR_ORDER[k][i].
PAIR_ORDER = {k: tuple(itertools.combinations(range(k), 2)) for k in (3, 4, 5)}


@dataclass(frozen=True)
class SmallGraph:
    """Induced subgraph on 3-5 vertices as an adjacency bitmask.

    ``bits`` uses only the low k*(k-1)/2 bits, one per unordered vertex pair
    in the fixed lexicographic pair order.
    """

    size: int
    bits: int

    def __post_init__(self) -> None:
        if self.size not in (3, 4, 5):
            raise GraphError(f"small graph size must be 3, 4, or 5, got {self.size}")
        nbits = self.size * (self.size - 1) // 2
        if not 0 <= self.bits < (1 << nbits):
            raise GraphError(f"bitmask {self.bits:#x} out of range for size {self.size}")

    @property
    def edge_count(self) -> int:
        return bin(self.bits).count("1")


class Graph:
    """Simple undirected graph with sorted per-vertex neighbor lists."""

    def __init__(
        self,
        adjacency: Sequence[Sequence[int]],
        label: str | None = None,
        original_labels: Sequence[str] | None = None,
    ):
        n = len(adjacency)
        if n < 1:
            raise GraphError("graph must have at least one vertex")
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        for u, nbrs in enumerate(adj):
            if len(nbrs) != len(adjacency[u]):
                raise GraphError(f"duplicate neighbor entries at vertex {u}")
            for v in nbrs:
                if v == u:
                    raise GraphError(f"self loop at vertex {u}")
                if not 0 <= v < n:
                    raise GraphError(f"neighbor {v} of vertex {u} out of range")
                if u not in adj[v]:
                    raise GraphError(f"asymmetric adjacency: {u}->{v} but not {v}->{u}")
        self.adjacency = adj
        self.vertex_count = n
        self.edge_count = sum(len(nbrs) for nbrs in adj) // 2
        self.label = label
        self.original_labels = tuple(original_labels) if original_labels is not None else None
        self._neighbor_sets = tuple(frozenset(nbrs) for nbrs in adj)
        # Flat numpy views used by the samplers and layout code.
        self.degrees = np.array([len(nbrs) for nbrs in adj], dtype=np.int64)
        if self.edge_count:
            self.edges = np.array(
                [(u, v) for u in range(n) for v in adj[u] if u < v], dtype=np.int64
            )
        else:
            self.edges = np.empty((0, 2), dtype=np.int64)
        # Sorted keys u*n+v for both orientations: O(log m) vectorized adjacency tests.
        both = np.concatenate([self.edges, self.edges[:, ::-1]]) if self.edge_count else self.edges
        self.edge_keys = np.sort(both[:, 0] * n + both[:, 1])

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return self.edge_count

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        label: str | None = None,
        original_labels: Sequence[str] | None = None,
    ) -> "Graph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls([sorted(s) for s in adj], label=label, original_labels=original_labels)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbor_sets[u]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._neighbor_sets[v]

    def contains_keys(self, keys: np.ndarray) -> np.ndarray:
        """Vectorized membership test for pair keys u*n+v (either orientation)."""
        idx = np.searchsorted(self.edge_keys, keys)
        idx_clipped = np.minimum(idx, max(len(self.edge_keys) - 1, 0))
        if len(self.edge_keys) == 0:
            return np.zeros(keys.shape, dtype=bool)
        return self.edge_keys[idx_clipped] == keys

    def bfs_distances(self, source: int) -> np.ndarray:
        """Hop distances from ``source``; unreachable vertices get -1."""
        dist = np.full(self.vertex_count, -1, dtype=np.int64)
        dist[source] = 0
        frontier = [source]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in self.adjacency[u]:
                    if dist[v] < 0:
                        dist[v] = d
                        nxt.append(v)
            frontier = nxt
        return dist

    def connected_components(self) -> list[list[int]]:
        seen = [False] * self.vertex_count
        comps = []
        for s in range(self.vertex_count):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        comp.append(v)
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.connected_components()) == 1

    def __repr__(self) -> str:
        tag = f" {self.label!r}" if self.label else ""
        return f"<Graph{tag} n={self.vertex_count} m={self.edge_count}>"


@dataclass
class ParsedEdgeList:
    """Parse result with counts of silently dropped dirty input."""

    graph: Graph
    self_loops_dropped: int
    duplicate_edges_dropped: int


def parse_edge_list_detailed(source: str | bytes) -> ParsedEdgeList:
    """Parse a UTF-8 edge list: one edge per line "u v", '#' comments.

    Vertices are renumbered 0..n-1 in first-appearance order; self loops and
    duplicate edges are dropped with counters. Blank lines are ignored.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    ids: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    self_loops = 0
    duplicates = 0
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"line {lineno}: expected 2 tokens, got {len(tokens)}: {raw!r}")
        a, b = tokens
        for t in (a, b):
            if t not in ids:
                ids[t] = len(ids)
        u, v = ids[a], ids[b]
        if u == v:
            self_loops += 1
            continue
        key = (min(u, v), max(u, v))
        if key in edges:
            duplicates += 1
            continue
        edges.add(key)
    if not ids:
        raise ParseError("empty edge list")
    labels = [None] * len(ids)
    for t, i in ids.items():
        labels[i] = t
    graph = Graph.from_edges(len(ids), sorted(edges), original_labels=labels)
    return ParsedEdgeList(graph, self_loops, duplicates)


def parse_edge_list(source: str | bytes) -> Graph:
    """Parse an edge list, discarding the drop counters."""
    return parse_edge_list_detailed(source).graph


def serialize_edge_list(g: Graph) -> str:
    """Canonical edge-list text: one "u v" line per edge, u < v.

    Edges are ordered by (max endpoint asc, min endpoint desc) so that on a
    canonically numbered graph each vertex first appears in id order; parsing
    the output therefore reproduces the same numbering.
    """
    ordered = sorted(g.edges.tolist(), key=lambda e: (e[1], -e[0]))
    return "".join(f"{u} {v}\n" for u, v in ordered)


def preprocess(g: Graph, min_vertices: int = 1) -> list[Graph]:
    """Split into connected components, dropping those below ``min_vertices``.

    Component vertices are renumbered 0..n_c-1 preserving relative order;
    original labels follow when present.
    """
    out = []
    for comp in g.connected_components():
        if len(comp) < min_vertices:
            continue
        remap = {v: i for i, v in enumerate(comp)}
        edges = [
            (remap[u], remap[v])
            for u in comp
            for v in g.adjacency[u]
            if u < v
        ]
        labels = None
        if g.original_labels is not None:
            labels = [g.original_labels[v] for v in comp]
        out.append(Graph.from_edges(len(comp), edges, label=g.label, original_labels=labels))
    return out


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> SmallGraph:
    """Induce the subgraph on 3-5 distinct vertices as a SmallGraph bitmask.

    Bit i is set iff the pair PAIR_ORDER[k][i] of *listed positions* is
    adjacent in ``g``.
    """
    k = len(vertices)
    if k not in (3, 4, 5):
        raise GraphError(f"induced subgraph needs 3-5 vertices, got {k}")
    if len(set(vertices)) != k:
        raise GraphError(f"duplicate vertices in {list(vertices)}")
    for v in vertices:
        if not 0 <= v < g.vertex_count:
            raise GraphError(f"vertex {v} out of range")
    bits = 0
    for i, (a, b) in enumerate(PAIR_ORDER[k]):
        if g.has_edge(vertices[a], vertices[b]):
            bits |= 1 << i
    return SmallGraph(k, bits)
