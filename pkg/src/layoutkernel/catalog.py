"""Canonical catalog of the 49 isomorphism classes of graphs on 3-5 vertices.

The canonical code of a small graph is the minimum adjacency bitmask over all
k! vertex permutations. A full lookup table (2^3 + 2^6 + 2^10 entries) maps
any bitmask to its class id in O(1), which keeps classification off the
sampling hot path. Class ids run 0..48 ordered by (size asc, edge count desc,
canonical code asc); 29 of the classes are connected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from layoutkernel.graph import PAIR_ORDER, SmallGraph

SIZES = (3, 4, 5)
NUM_CLASSES = 49
NUM_CONNECTED = 29


@dataclass(frozen=True)
class GraphletClass:
    id: int
    size: int
    edge_count: int
    connected: bool
    canonical_code: int


@dataclass(frozen=True)
class GraphletCatalog:
    classes: tuple[GraphletClass, ...]
    # Per size: dense numpy table of length 2^(k(k-1)/2), bitmask -> class id.
    tables: dict[int, np.ndarray]
    # Class ids of connected classes, in catalog order (defines the 29 RW slots).
    connected_ids: tuple[int, ...]

    def class_for(self, sg: SmallGraph) -> GraphletClass:
        return self.classes[int(self.tables[sg.size][sg.bits])]

    def connected_slot(self, class_id: int) -> int:
        """Index of a connected class among the 29 connected slots, else -1."""
        return self._connected_slots[class_id]

    @property
    def _connected_slots(self) -> np.ndarray:
        slots = np.full(len(self.classes), -1, dtype=np.int64)
        for i, cid in enumerate(self.connected_ids):
            slots[cid] = i
        return slots


def _permutation_bit_maps(k: int) -> list[list[int]]:
    """For each vertex permutation, where each pair-order bit position lands."""
    pairs = PAIR_ORDER[k]
    pair_index = {p: i for i, p in enumerate(pairs)}
    maps = []
    for perm in itertools.permutations(range(k)):
        dst = []
        for (i, j) in pairs:
            a, b = perm[i], perm[j]
            dst.append(pair_index[(min(a, b), max(a, b))])
        maps.append(dst)
    return maps


@lru_cache(maxsize=None)
def _canonical_table(k: int) -> np.ndarray:
    """Canonical code for every adjacency bitmask of size k."""
    nbits = k * (k - 1) // 2
    masks = np.arange(1 << nbits, dtype=np.int64)
    permuted = np.empty((len(_PERM_MAPS[k]), len(masks)), dtype=np.int64)
    for p, dst in enumerate(_PERM_MAPS[k]):
        acc = np.zeros(len(masks), dtype=np.int64)
        for src_bit, dst_bit in enumerate(dst):
            acc |= ((masks >> src_bit) & 1) << dst_bit
        permuted[p] = acc
    return permuted.min(axis=0)


_PERM_MAPS = {k: _permutation_bit_maps(k) for k in SIZES}


def _is_connected_mask(k: int, bits: int) -> bool:
    adj = [0] * k
    for i, (a, b) in enumerate(PAIR_ORDER[k]):
        if bits >> i & 1:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
    seen = 1
    stack = [0]
    while stack:
        u = stack.pop()
        rest = adj[u] & ~seen
        while rest:
            v = (rest & -rest).bit_length() - 1
            seen |= 1 << v
            stack.append(v)
            rest &= rest - 1
    return seen == (1 << k) - 1


def canonical_code(sg: SmallGraph) -> int:
    """Minimum adjacency bitmask of ``sg`` over all vertex permutations."""
    return int(_canonical_table(sg.size)[sg.bits])


@lru_cache(maxsize=1)
def build_catalog() -> GraphletCatalog:
    """Enumerate all 49 classes and build the bitmask lookup tables."""
    entries = []
    for k in SIZES:
        canon = _canonical_table(k)
        for code in sorted(set(canon.tolist())):
            entries.append((k, -int(bin(code).count("1")), code))
    entries.sort()
    classes = []
    code_to_id: dict[tuple[int, int], int] = {}
    for cid, (k, neg_edges, code) in enumerate(entries):
        connected = _is_connected_mask(k, code)
        classes.append(GraphletClass(cid, k, -neg_edges, connected, code))
        code_to_id[(k, code)] = cid
    tables = {}
    for k in SIZES:
        canon = _canonical_table(k)
        ids = np.array([code_to_id[(k, int(c))] for c in canon], dtype=np.int64)
        tables[k] = ids
    connected_ids = tuple(c.id for c in classes if c.connected)
    return GraphletCatalog(tuple(classes), tables, connected_ids)


def classify(sg: SmallGraph, cat: GraphletCatalog | None = None) -> int:
    """Class id of a small graph; constant on isomorphism orbits."""
    cat = cat or build_catalog()
    return int(cat.tables[sg.size][sg.bits])


def catalog_json() -> list[dict]:
    """The 49 classes as plain dicts for the ``catalog dump`` CLI command."""
    return [
        {
            "id": c.id,
            "size": c.size,
            "edge_count": c.edge_count,
            "connected": c.connected,
            "canonical_code": c.canonical_code,
        }
        for c in build_catalog().classes
    ]
