"""Nearest-neighbor retrieval of topologically similar corpus graphs.

Similarity comes from the kernel; a size window keeps matches comparable:
a corpus graph qualifies only when its vertex count is more than half and
less than double the query's (strict on both sides). Further constraints can
be plugged in as predicates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from layoutkernel.kernel import FeatureVector, KernelConfig, kernel_row


@dataclass(frozen=True)
class CorpusEntry:
    graph_id: str
    features: FeatureVector
    vertex_count: int


@dataclass(frozen=True)
class SimilarityResult:
    graph_id: str
    similarity: float
    rank: int


def size_window(query_n: int) -> Callable[[CorpusEntry], bool]:
    """Strict window: query_n / 2 < n < 2 * query_n."""
    return lambda entry: 2 * entry.vertex_count > query_n and entry.vertex_count < 2 * query_n


def find_similar(
    query_features: FeatureVector,
    query_n: int,
    corpus: Sequence[CorpusEntry],
    k: int,
    config: KernelConfig,
    extra_constraints: Sequence[Callable[[CorpusEntry], bool]] = (),
) -> list[SimilarityResult]:
    """Top-k corpus graphs by similarity, size window enforced.

    Ties are broken by graph id ascending; fewer than k results are returned
    when the filtered corpus is smaller.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    admit = size_window(query_n)
    kept = [e for e in corpus if admit(e) and all(c(e) for c in extra_constraints)]
    if not kept:
        return []
    sims = kernel_row(query_features, [e.features for e in kept], config)
    ranked = sorted(zip(kept, sims), key=lambda pair: (-pair[1], pair[0].graph_id))
    return [
        SimilarityResult(graph_id=e.graph_id, similarity=float(s), rank=i + 1)
        for i, (e, s) in enumerate(ranked[:k])
    ]
