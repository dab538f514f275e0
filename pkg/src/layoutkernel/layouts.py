"""Straight-line 2-D layout generators for ground-truth data.

Spring layout (Fruchterman-Reingold force model), high-dimensional embedding
(pivot BFS distances projected onto two principal components), a circular
baseline, and an importer for layouts computed by external tools. All
generators are pure functions of (graph, params, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from layoutkernel.graph import Graph, GraphError


class LayoutMethod(str, Enum):
    FR = "fr"
    HDE = "hde"
    CIRCULAR = "circular"
    IMPORTED = "imported"


class LayoutError(ValueError):
    """Raised for invalid layout inputs."""


@dataclass
class Layout:
    positions: np.ndarray
    method: LayoutMethod
    graph_id: str | None = None

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise LayoutError("positions must be an (n, 2) array")
        if not np.all(np.isfinite(self.positions)):
            raise LayoutError("positions must be finite")

    @property
    def vertex_count(self) -> int:
        return len(self.positions)


# Spring model constants: unit drawing area, ideal edge length sqrt(area/n),
# initial temperature 0.1 with linear cooling, positions clamped to the frame.
FR_AREA = 1.0
FR_INITIAL_TEMPERATURE = 0.1
_FR_DENSE_LIMIT = 1500
# Above the dense limit, repulsion uses at most this many nearest neighbors
# within radius 2k; an uncapped radius query degenerates to O(n^2) whenever
# the layout transiently contracts into a dense cluster.
_FR_NEIGHBOR_CAP = 24
_MIN_DIST = 1e-9


def layout_fr(g: Graph, iterations: int = 500, seed: int = 0) -> Layout:
    """Force-directed layout: repulsion k^2/d between vertex pairs, attraction
    d^2/k along edges, displacement capped by a linearly cooling temperature.

    Beyond ``_FR_DENSE_LIMIT`` vertices, repulsion is restricted to pairs
    within radius 2k (the classic grid-neighborhood approximation), which
    keeps large runs near-linear per iteration.
    """
    if iterations < 1:
        raise LayoutError("iterations must be >= 1")
    n = g.vertex_count
    rng = np.random.default_rng(seed)
    pos = rng.random((n, 2))
    if n == 1:
        return Layout(pos, LayoutMethod.FR, g.label)
    k = math.sqrt(FR_AREA / n)
    edges = g.edges
    dense = n <= _FR_DENSE_LIMIT
    for it in range(iterations):
        t = FR_INITIAL_TEMPERATURE * (1.0 - it / iterations)
        disp = np.zeros((n, 2))
        if dense:
            dx = pos[:, 0, None] - pos[None, :, 0]
            dy = pos[:, 1, None] - pos[None, :, 1]
            d2 = np.maximum(dx * dx + dy * dy, _MIN_DIST**2)
            np.fill_diagonal(d2, np.inf)
            f = k**2 / d2  # diff/d * k^2/d, without the sqrt
            disp[:, 0] = (dx * f).sum(axis=1)
            disp[:, 1] = (dy * f).sum(axis=1)
        else:
            nn_dist, nn_idx = cKDTree(pos).query(
                pos, k=_FR_NEIGHBOR_CAP + 1, distance_upper_bound=2.0 * k
            )
            nn_dist, nn_idx = nn_dist[:, 1:], nn_idx[:, 1:]  # drop self
            valid = nn_idx < n
            safe_idx = np.where(valid, nn_idx, 0)
            diff = pos[:, None, :] - pos[safe_idx]
            dist = np.maximum(nn_dist, _MIN_DIST)
            push = np.where(valid, k**2 / dist**2, 0.0)
            disp += (diff * push[:, :, None]).sum(axis=1)
        if len(edges):
            u, v = edges[:, 0], edges[:, 1]
            diff = pos[u] - pos[v]
            dist = np.maximum(np.sqrt((diff**2).sum(axis=1)), _MIN_DIST)
            pull = diff * (dist / k)[:, None]
            np.add.at(disp, u, -pull)
            np.add.at(disp, v, pull)
        length = np.maximum(np.sqrt((disp**2).sum(axis=1)), _MIN_DIST)
        pos += disp / length[:, None] * np.minimum(length, t)[:, None]
        np.clip(pos, 0.0, 1.0, out=pos)
    _separate_duplicates(pos)
    return Layout(pos, LayoutMethod.FR, g.label)


def _separate_duplicates(pos: np.ndarray) -> None:
    """Nudge exactly coincident vertices apart, staying inside the frame.

    Frame clamping can pin several vertices onto the same corner; repulsion
    cannot act on an exactly zero difference vector, so identical rows are
    spread on a tiny deterministic spiral instead.
    """
    _, inverse, counts = np.unique(pos, axis=0, return_inverse=True, return_counts=True)
    golden = 2.399963229728653
    for group in np.flatnonzero(counts > 1):
        members = np.flatnonzero(inverse == group)
        anchor = np.clip(pos[members[0]], 1e-7, 1.0 - 1e-7)
        for rank, v in enumerate(members):
            angle = golden * (rank + 1)
            pos[v] = anchor + 1e-8 * (rank + 1) * np.array([math.cos(angle), math.sin(angle)])


def _power_iteration(mat: np.ndarray, rng: np.random.Generator,
                     tol: float = 1e-9, max_iter: int = 1000) -> tuple[float, np.ndarray]:
    p = mat.shape[0]
    if np.linalg.norm(mat) < 1e-12:
        return 0.0, np.zeros(p)
    v = rng.standard_normal(p)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = mat @ v
        norm = np.linalg.norm(w)
        if norm < 1e-15:
            return 0.0, np.zeros(p)
        w /= norm
        if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < tol:
            v = w
            break
        v = w
    lam = float(v @ mat @ v)
    return lam, v


def layout_hde(g: Graph, pivot_count: int = 50, seed: int = 0) -> Layout:
    """Embed BFS distances from farthest-first pivots, project onto the top-2
    principal components (power iteration with deflation).

    Effective pivot count is min(pivot_count, n). Requires a connected graph.
    """
    if pivot_count < 2:
        raise LayoutError("pivot_count must be >= 2")
    n = g.vertex_count
    rng = np.random.default_rng(seed)
    p = min(pivot_count, n)
    start = int(rng.integers(n))
    dist0 = g.bfs_distances(start)
    if np.any(dist0 < 0):
        raise GraphError("graph must be connected for distance embedding")
    pivots = [start]
    columns = [dist0]
    farthest = dist0.astype(np.float64)
    while len(pivots) < p:
        nxt = int(np.argmax(farthest))
        pivots.append(nxt)
        d = g.bfs_distances(nxt)
        columns.append(d)
        farthest = np.minimum(farthest, d)
    x = np.stack(columns, axis=1).astype(np.float64)
    x -= x.mean(axis=0)
    cov = x.T @ x
    lam1, u1 = _power_iteration(cov, rng)
    cov = cov - lam1 * np.outer(u1, u1)
    _, u2 = _power_iteration(cov, rng)
    positions = np.stack([x @ u1, x @ u2], axis=1)
    return Layout(positions, LayoutMethod.HDE, g.label)


def layout_circular(g: Graph) -> Layout:
    """Vertex i at angle 2*pi*i/n on the unit circle."""
    n = g.vertex_count
    angles = 2.0 * np.pi * np.arange(n) / n
    return Layout(np.stack([np.cos(angles), np.sin(angles)], axis=1),
                  LayoutMethod.CIRCULAR, g.label)


def import_layout(g: Graph, source: str | bytes) -> Layout:
    """Read "vertex_id x y" lines covering every vertex exactly once."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    n = g.vertex_count
    positions = np.full((n, 2), np.nan)
    seen = set()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise LayoutError(f"line {lineno}: expected 'id x y', got {raw!r}")
        try:
            vid = int(tokens[0])
        except ValueError:
            raise LayoutError(f"line {lineno}: bad vertex id {tokens[0]!r}") from None
        if not 0 <= vid < n:
            raise LayoutError(f"line {lineno}: unknown vertex id {vid}")
        if vid in seen:
            raise LayoutError(f"line {lineno}: duplicate vertex id {vid}")
        try:
            xy = (float(tokens[1]), float(tokens[2]))
        except ValueError:
            raise LayoutError(f"line {lineno}: bad coordinates {raw!r}") from None
        if not all(math.isfinite(c) for c in xy):
            raise LayoutError(f"line {lineno}: non-finite coordinate {raw!r}")
        positions[vid] = xy
        seen.add(vid)
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise LayoutError(f"missing positions for vertices {missing[:5]}")
    return Layout(positions, LayoutMethod.IMPORTED, g.label)


def serialize_layout(layout: Layout) -> str:
    """Full-precision "vertex_id x y" lines that round-trip through import."""
    return "".join(
        f"{i} {x!r} {y!r}\n" for i, (x, y) in enumerate(layout.positions.tolist())
    )
