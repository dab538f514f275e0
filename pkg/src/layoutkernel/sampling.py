"""Graphlet frequency estimation: random-vertex and random-walk sampling,
plus exhaustive enumeration as the exact reference.

All samplers return weighted counts over the 49 catalog classes. RV and EXACT
touch both connected and disconnected classes; RW grows a connected vertex
set by neighbor expansion, so only connected classes ever receive weight.
Results are deterministic given (graph, sizes, count, seed).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from layoutkernel.catalog import NUM_CLASSES, build_catalog
from layoutkernel.graph import PAIR_ORDER, Graph, GraphError

ENUMERATION_GUARD = 10**8
_CHUNK = 1 << 18


class Sampler(str, Enum):
    RV = "rv"
    RW = "rw"
    EXACT = "exact"


@dataclass
class GraphletCounts:
    """Weighted occurrence counts per graphlet class id."""

    weights: np.ndarray
    sample_count: int
    sampler: Sampler
    sizes: frozenset[int]

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (NUM_CLASSES,):
            raise ValueError(f"weights must have shape ({NUM_CLASSES},)")

    def concentration(self) -> np.ndarray:
        total = self.weights.sum()
        if total == 0:
            raise ValueError("no graphlet weight accumulated")
        return self.weights / total

    def size_balanced_concentration(self) -> np.ndarray:
        """Concentration with each size normalized separately, equal shares.

        Matches the equal per-size budget of the samplers, so exact counts
        become directly comparable to sampled ones: exhaustive totals scale
        with C(n,k) per size while a sampler draws the same number of each
        size.
        """
        cat = build_catalog()
        class_sizes = np.array([c.size for c in cat.classes])
        out = np.zeros(NUM_CLASSES)
        ks = sorted(self.sizes)
        for k in ks:
            mask = class_sizes == k
            total = self.weights[mask].sum()
            if total > 0:
                out[mask] = self.weights[mask] / total / len(ks)
        return out


def _check_sizes(g: Graph, sizes) -> tuple[int, ...]:
    ks = tuple(sorted(set(int(k) for k in sizes)))
    if not ks:
        raise ValueError("sizes must be nonempty")
    for k in ks:
        if k not in (3, 4, 5):
            raise ValueError(f"graphlet size {k} not supported (3-5 only)")
        if g.vertex_count < k:
            raise GraphError(f"graph has n={g.vertex_count} < requested size {k}")
    return ks


def _per_size_budget(ks: tuple[int, ...], count: int) -> dict[int, int]:
    # Round-robin over sorted sizes: sample i draws size ks[i % len(ks)].
    base, extra = divmod(count, len(ks))
    return {k: base + (1 if i < extra else 0) for i, k in enumerate(ks)}


def _classify_vertex_rows(g: Graph, rows: np.ndarray, k: int) -> np.ndarray:
    """Class-id histogram (length 49) for an (N, k) array of vertex tuples."""
    table = build_catalog().tables[k]
    n = g.vertex_count
    bits = np.zeros(len(rows), dtype=np.int64)
    for i, (a, b) in enumerate(PAIR_ORDER[k]):
        keys = rows[:, a] * n + rows[:, b]
        bits |= g.contains_keys(keys).astype(np.int64) << i
    ids = table[bits]
    return np.bincount(ids, minlength=NUM_CLASSES).astype(np.float64)


def _random_distinct_rows(rng: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    """(count, k) arrays of distinct-vertex samples, uniform over k-subsets."""
    if n <= 128:
        # Collision-heavy regime: rank k out of n random floats per row.
        out = np.empty((count, k), dtype=np.int64)
        done = 0
        while done < count:
            c = min(_CHUNK, count - done)
            scores = rng.random((c, n), dtype=np.float32)
            out[done : done + c] = np.argpartition(scores, k, axis=1)[:, :k]
            done += c
        return out
    rows = rng.integers(0, n, size=(count, k), dtype=np.int64)
    bad = np.ones(count, dtype=bool)
    while True:
        srt = np.sort(rows[bad], axis=1)
        dup = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
        idx = np.flatnonzero(bad)
        bad[:] = False
        bad[idx[dup]] = True
        if not bad.any():
            return rows
        rows[bad] = rng.integers(0, n, size=(int(bad.sum()), k), dtype=np.int64)


def sample_rv(g: Graph, sizes, count: int, seed: int) -> GraphletCounts:
    """Random-vertex sampling: k uniform distinct vertices per sample.

    Counts include disconnected classes. The per-size budget is an equal
    round-robin split of ``count`` over the sorted sizes.
    """
    ks = _check_sizes(g, sizes)
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    weights = np.zeros(NUM_CLASSES)
    for k, budget in _per_size_budget(ks, count).items():
        if budget == 0:
            continue
        rows = _random_distinct_rows(rng, g.vertex_count, k, budget)
        weights += _classify_vertex_rows(g, rows, k)
    return GraphletCounts(weights, count, Sampler.RV, frozenset(ks))


def sample_rw(g: Graph, sizes, count: int, seed: int) -> GraphletCounts:
    """Random-walk sampling by neighbor expansion.

    Each sample starts at a uniform random vertex and repeatedly adds a
    uniformly random element of N(S)\\S until the set has k vertices, so every
    sampled graphlet is connected. Biased toward dense regions; no occurrence
    reweighting is applied (the kernel only needs a feature map that is
    consistent across graphs).
    """
    ks = _check_sizes(g, sizes)
    if count < 1:
        raise ValueError("count must be >= 1")
    if not g.is_connected():
        raise GraphError("random-walk sampling requires a connected graph")
    rng = random.Random(seed)
    n = g.vertex_count
    adjacency = g.adjacency
    tables = {k: build_catalog().tables[k] for k in ks}
    pair_orders = {k: PAIR_ORDER[k] for k in ks}
    hist = np.zeros(NUM_CLASSES)
    nks = len(ks)
    for i in range(count):
        k = ks[i % nks]
        start = rng.randrange(n)
        members = [start]
        in_set = {start}
        cand_list = list(adjacency[start])
        cand_seen = set(cand_list)
        while len(members) < k:
            j = rng.randrange(len(cand_list))
            v = cand_list[j]
            if v in in_set:
                cand_list[j] = cand_list[-1]
                cand_list.pop()
                continue
            members.append(v)
            in_set.add(v)
            for w in adjacency[v]:
                if w not in cand_seen and w not in in_set:
                    cand_seen.add(w)
                    cand_list.append(w)
        bits = 0
        for bit, (a, b) in enumerate(pair_orders[k]):
            if members[b] in g.neighbor_set(members[a]):
                bits |= 1 << bit
        hist[tables[k][bits]] += 1.0
    return GraphletCounts(hist, count, Sampler.RW, frozenset(ks))


def enumeration_cost(n: int, sizes) -> int:
    return sum(math.comb(n, k) for k in set(sizes))


def enumerate_exact(g: Graph, sizes, connected_only: bool = False) -> GraphletCounts:
    """Exhaustively induce and classify every k-subset once, weight 1 each."""
    ks = _check_sizes(g, sizes)
    cost = enumeration_cost(g.vertex_count, ks)
    if cost > ENUMERATION_GUARD:
        raise GraphError(
            f"enumeration of {cost} subsets exceeds guard {ENUMERATION_GUARD}; "
            "use sampling instead"
        )
    weights = np.zeros(NUM_CLASSES)
    total = 0
    for k in ks:
        combos = itertools.combinations(range(g.vertex_count), k)
        while True:
            chunk = np.fromiter(
                itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)),
                dtype=np.int64,
            ).reshape(-1, k)
            if len(chunk) == 0:
                break
            weights += _classify_vertex_rows(g, chunk, k)
            total += len(chunk)
    if connected_only:
        cat = build_catalog()
        connected_mask = np.array([c.connected for c in cat.classes])
        weights = np.where(connected_mask, weights, 0.0)
    return GraphletCounts(weights, total, Sampler.EXACT, frozenset(ks))
