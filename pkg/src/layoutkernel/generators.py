"""Synthetic connected-graph families for building training corpora.

Four families: Erdos-Renyi G(n, p) reduced to its largest component,
preferential-attachment trees with optional extra edges, near-square 2-D
grid meshes, and uniform random labeled trees. All generators are
deterministic given their seed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from layoutkernel.graph import Graph, preprocess

FAMILIES = ("gnp", "pa", "grid", "tree")


@dataclass(frozen=True)
class FamilySpec:
    """One batch of synthetic graphs to generate."""

    family: str
    count: int
    n_min: int
    n_max: int
    # gnp: edge probability; None picks 2 ln(n) / n (connectivity regime).
    p: float | None = None
    # pa: extra preferential edges per vertex beyond the attachment tree.
    extra_edges: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.p is not None and not 0.0 < self.p <= 1.0:
            raise ValueError("p must be in (0, 1]; p = 0 cannot produce a connected graph")


@dataclass(frozen=True)
class CorpusSpec:
    entries: tuple[FamilySpec, ...] = field(default_factory=tuple)

    @classmethod
    def parse(cls, text: str) -> "CorpusSpec":
        """Parse "family:count:n_min-n_max[:p=..][:extra=..]" items, comma separated."""
        entries = []
        for item in text.split(","):
            parts = item.strip().split(":")
            if len(parts) < 3:
                raise ValueError(f"bad family spec {item!r}")
            family, count, span = parts[0], int(parts[1]), parts[2]
            lo, _, hi = span.partition("-")
            n_min, n_max = int(lo), int(hi) if hi else int(lo)
            kwargs = {}
            for extra in parts[3:]:
                key, _, value = extra.partition("=")
                if key == "p":
                    kwargs["p"] = float(value)
                elif key == "extra":
                    kwargs["extra_edges"] = int(value)
                else:
                    raise ValueError(f"unknown option {key!r} in {item!r}")
            entries.append(FamilySpec(family, count, n_min, n_max, **kwargs))
        return cls(tuple(entries))


def gnp_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Largest connected component of G(n, p)."""
    upper = np.triu_indices(n, k=1)
    mask = rng.random(len(upper[0])) < p
    edges = list(zip(upper[0][mask].tolist(), upper[1][mask].tolist()))
    g = Graph.from_edges(n, edges)
    components = preprocess(g, min_vertices=1)
    return max(components, key=lambda c: c.vertex_count)


def pa_graph(n: int, extra_edges: int, rng: np.random.Generator) -> Graph:
    """Preferential-attachment tree plus extra preferential edges."""
    if n == 1:
        return Graph.from_edges(1, [])
    edges = [(0, 1)]
    # Repeated-endpoints trick: a vertex appears once per incident edge.
    endpoints = [0, 1]
    for v in range(2, n):
        target = int(endpoints[rng.integers(len(endpoints))])
        edges.append((target, v))
        endpoints.extend((target, v))
    edge_set = {tuple(sorted(e)) for e in edges}
    for _ in range(extra_edges):
        u = int(endpoints[rng.integers(len(endpoints))])
        v = int(endpoints[rng.integers(len(endpoints))])
        if u != v and tuple(sorted((u, v))) not in edge_set:
            edge_set.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(edge_set))


def grid_graph(n_target: int) -> Graph:
    """Near-square 2-D mesh with about n_target vertices."""
    rows = max(1, round(math.sqrt(n_target)))
    cols = max(1, round(n_target / rows))
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def tree_graph(n: int, rng: np.random.Generator) -> Graph:
    """Uniform random labeled tree via a random Pruefer sequence."""
    if n == 1:
        return Graph.from_edges(1, [])
    if n == 2:
        return Graph.from_edges(2, [(0, 1)])
    prufer = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=np.int64)
    for v in prufer:
        degree[v] += 1
    edges = []
    leaves = [int(v) for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in prufer:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, int(v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, int(v))
    u = heapq.heappop(leaves)
    edges.append((u, heapq.heappop(leaves)))
    return Graph.from_edges(n, edges)


def generate_graph(spec: FamilySpec, rng: np.random.Generator) -> Graph:
    n = int(rng.integers(spec.n_min, spec.n_max + 1))
    if spec.family == "gnp":
        p = spec.p if spec.p is not None else min(1.0, 2.0 * math.log(max(n, 2)) / n)
        return gnp_graph(n, p, rng)
    if spec.family == "pa":
        return pa_graph(n, spec.extra_edges, rng)
    if spec.family == "grid":
        return grid_graph(n)
    return tree_graph(n, rng)


def generate_corpus_graphs(spec: CorpusSpec, seed: int) -> list[tuple[str, Graph]]:
    """All graphs for a corpus spec as (id, graph) pairs, deterministic."""
    out = []
    for entry_idx, entry in enumerate(spec.entries):
        for i in range(entry.count):
            rng = np.random.default_rng((seed, entry_idx, i))
            g = generate_graph(entry, rng)
            out.append((f"{entry.family}-{entry_idx}-{i:04d}", g))
    return out
