"""Aesthetic metrics of a straight-line drawing: crosslessness, minimum
incident angle, edge length variation, and the shape metric (mean Jaccard
similarity against the Gabriel graph of the vertex positions).

All four metrics are normalized to [0, 1] and are invariant under
translation, rotation, and uniform scaling of the layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from layoutkernel.graph import Graph, GraphError
from layoutkernel.layouts import Layout

# Cross products with magnitude at or below this are treated as degenerate
# (collinear) when classifying segment intersections.
DEGENERACY_EPS = 1e-12

_PAIR_BLOCK = 1 << 20


class MetricError(ValueError):
    """Raised when a metric is undefined for the given input."""


@dataclass
class MetricsRecord:
    m_c: float
    m_a: float
    m_l: float
    m_s: float

    def __post_init__(self) -> None:
        for name in ("m_c", "m_a", "m_l", "m_s"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise MetricError(f"{name}={v} outside [0, 1]")

    def to_json(self) -> dict:
        return {"m_c": self.m_c, "m_a": self.m_a, "m_l": self.m_l, "m_s": self.m_s}

    @classmethod
    def from_json(cls, data: dict) -> "MetricsRecord":
        return cls(
            m_c=float(data["m_c"]), m_a=float(data["m_a"]),
            m_l=float(data["m_l"]), m_s=float(data["m_s"]),
        )


def _check_layout(g: Graph, layout: Layout) -> np.ndarray:
    if layout.vertex_count != g.vertex_count:
        raise MetricError(
            f"layout has {layout.vertex_count} positions for {g.vertex_count} vertices"
        )
    return layout.positions


def _cross2(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _collinear_open_overlap(a, b, c, d) -> bool:
    """Open-interval overlap of two collinear segments (1 when overlapping)."""
    ab = b - a
    axis = ab if ab @ ab > 0 else d - c
    if axis @ axis == 0:
        return False
    t = [p @ axis for p in (a, b, c, d)]
    lo = max(min(t[0], t[1]), min(t[2], t[3]))
    hi = min(max(t[0], t[1]), max(t[2], t[3]))
    return lo < hi


def count_crossings(g: Graph, layout: Layout) -> int:
    """Number of unordered edge pairs whose open segments intersect.

    Pairs sharing an endpoint are never counted. Collinear overlapping
    segments count as one crossing. Cross products within DEGENERACY_EPS of
    zero classify as degenerate.
    """
    pos = _check_layout(g, layout)
    edges = g.edges
    m = len(edges)
    if m < 2:
        return 0
    p1 = pos[edges[:, 0]]
    p2 = pos[edges[:, 1]]
    lo = np.minimum(p1, p2)
    hi = np.maximum(p1, p2)
    total = 0
    ii, jj = np.triu_indices(m, k=1)
    for start in range(0, len(ii), _PAIR_BLOCK):
        i = ii[start : start + _PAIR_BLOCK]
        j = jj[start : start + _PAIR_BLOCK]
        shared = (
            (edges[i, 0] == edges[j, 0]) | (edges[i, 0] == edges[j, 1])
            | (edges[i, 1] == edges[j, 0]) | (edges[i, 1] == edges[j, 1])
        )
        boxed = np.all(lo[i] <= hi[j], axis=1) & np.all(lo[j] <= hi[i], axis=1)
        keep = boxed & ~shared
        if not keep.any():
            continue
        i, j = i[keep], j[keep]
        a, b, c, d = p1[i], p2[i], p1[j], p2[j]
        ab = b - a
        cd = d - c
        d1 = _cross2(ab, c - a)
        d2 = _cross2(ab, d - a)
        d3 = _cross2(cd, a - c)
        d4 = _cross2(cd, b - c)
        eps = DEGENERACY_EPS
        opposite_1 = ((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))
        opposite_2 = ((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps))
        total += int(np.count_nonzero(opposite_1 & opposite_2))
        degenerate = (
            (np.abs(d1) <= eps) & (np.abs(d2) <= eps)
            & (np.abs(d3) <= eps) & (np.abs(d4) <= eps)
        )
        for idx in np.flatnonzero(degenerate):
            if _collinear_open_overlap(a[idx], b[idx], c[idx], d[idx]):
                total += 1
    return total


def max_crossings(g: Graph) -> float:
    """Approximated crossing upper bound: all edge pairs minus incident ones."""
    m = g.edge_count
    deg = g.degrees
    return m * (m - 1) / 2.0 - 0.5 * float((deg * (deg - 1)).sum())


def metric_crosslessness(g: Graph, layout: Layout) -> float:
    """1 - crossings / upper bound; 1 when the bound is zero. Clamped to [0,1]
    because the bound is approximate."""
    c_max = max_crossings(g)
    if c_max <= 0:
        return 1.0
    value = 1.0 - count_crossings(g, layout) / c_max
    return min(1.0, max(0.0, value))


def metric_min_angle(g: Graph, layout: Layout) -> float:
    """Closeness of each vertex's smallest incident-edge angle to its ideal
    360/deg(v); vertices of degree <= 1 contribute zero deviation."""
    pos = _check_layout(g, layout)
    n = g.vertex_count
    deviation_sum = 0.0
    for v in range(n):
        nbrs = g.adjacency[v]
        if len(nbrs) < 2:
            continue
        vectors = pos[list(nbrs)] - pos[v]
        if np.any(np.all(vectors == 0.0, axis=1)):
            raise MetricError(f"zero-length edge at vertex {v}")
        angles = np.sort(np.arctan2(vectors[:, 1], vectors[:, 0]))
        gaps = np.diff(angles, append=angles[0] + 2.0 * math.pi)
        theta_min = float(gaps.min())
        theta_ideal = 2.0 * math.pi / len(nbrs)
        deviation_sum += abs(theta_ideal - theta_min) / theta_ideal
    return 1.0 - deviation_sum / n


def metric_edge_length_variation(g: Graph, layout: Layout) -> float:
    """Coefficient of variation of edge lengths over its upper bound
    sqrt(m - 1)."""
    pos = _check_layout(g, layout)
    m = g.edge_count
    if m < 2:
        raise MetricError("edge length variation needs at least 2 edges")
    lengths = np.sqrt(((pos[g.edges[:, 0]] - pos[g.edges[:, 1]]) ** 2).sum(axis=1))
    mean = float(lengths.mean())
    if mean == 0:
        raise MetricError("edge length variation undefined for zero mean length")
    cv = math.sqrt(float(((lengths - mean) ** 2).sum()) / (m * mean**2))
    return cv / math.sqrt(m - 1)


def gabriel_graph(points: np.ndarray) -> Graph:
    """Edge (u,v) iff no other point lies in or on the closed disk with uv as
    diameter (strict: a boundary point kills the edge)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    n = len(pts)
    if n < 2:
        raise ValueError("Gabriel graph needs at least 2 points")
    sq = (pts**2).sum(axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * pts @ pts.T, 0.0)
    blocked = d2.copy()
    np.fill_diagonal(blocked, np.inf)
    edges = []
    for u in range(n):
        detour = d2[u][:, None] + blocked  # [w, v] -> |uw|^2 + |wv|^2
        detour[u, :] = np.inf
        closest = detour.min(axis=0)
        for v in range(u + 1, n):
            if closest[v] > d2[u, v]:
                edges.append((u, v))
    return Graph.from_edges(n, edges)


def mean_jaccard(g1: Graph, g2: Graph) -> float:
    """Mean per-vertex Jaccard similarity of neighbor sets; a vertex isolated
    in both graphs counts as 1."""
    if g1.vertex_count != g2.vertex_count:
        raise MetricError(
            f"vertex count mismatch: {g1.vertex_count} vs {g2.vertex_count}"
        )
    total = 0.0
    for v in range(g1.vertex_count):
        n1 = g1.neighbor_set(v)
        n2 = g2.neighbor_set(v)
        union = len(n1 | n2)
        total += len(n1 & n2) / union if union else 1.0
    return total / g1.vertex_count


def metric_shape(g: Graph, layout: Layout) -> float:
    """Mean Jaccard similarity between the graph and the Gabriel graph of its
    drawn vertex positions."""
    pos = _check_layout(g, layout)
    if g.vertex_count < 2:
        raise MetricError("shape metric needs at least 2 vertices")
    return mean_jaccard(g, gabriel_graph(pos))


def compute_metrics(g: Graph, layout: Layout) -> MetricsRecord:
    """All four metrics for one (graph, layout) pair."""
    return MetricsRecord(
        m_c=metric_crosslessness(g, layout),
        m_a=metric_min_angle(g, layout),
        m_l=metric_edge_length_variation(g, layout),
        m_s=metric_shape(g, layout),
    )
