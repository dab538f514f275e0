import numpy as np
import pytest

from layoutkernel.catalog import build_catalog
from layoutkernel.graph import Graph, GraphError
from layoutkernel.sampling import (
    Sampler,
    enumerate_exact,
    enumeration_cost,
    sample_rv,
    sample_rw,
)
from tests.conftest import random_connected_graph, random_graph


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def class_id(size, edge_count, connected=None):
    cat = build_catalog()
    hits = [
        c.id for c in cat.classes
        if c.size == size and c.edge_count == edge_count
        and (connected is None or c.connected == connected)
    ]
    assert len(hits) == 1, f"ambiguous class lookup ({size}, {edge_count})"
    return hits[0]


def test_rv_k4_all_triangles():
    counts = sample_rv(complete_graph(4), {3}, 1000, seed=1)
    assert counts.weights[class_id(3, 3)] == 1000
    assert counts.weights.sum() == 1000


def test_rv_matches_exact_on_p4():
    counts = sample_rv(path_graph(4), {3}, 200_000, seed=2)
    conc = counts.concentration()
    # Exact: of the 4 vertex triples, 2 induce paths and 2 an edge+isolated.
    assert conc[class_id(3, 2)] == pytest.approx(0.5, abs=0.01)
    assert conc[class_id(3, 1)] == pytest.approx(0.5, abs=0.01)


def test_rv_rejects_small_graph():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(GraphError):
        sample_rv(star, {5}, 10, seed=0)


def test_rv_round_robin_budget():
    counts = sample_rv(complete_graph(6), {3, 4, 5}, 10, seed=0)
    cat = build_catalog()
    sizes = np.array([c.size for c in cat.classes])
    per_size = {k: counts.weights[sizes == k].sum() for k in (3, 4, 5)}
    assert per_size == {3: 4, 4: 3, 5: 3}


def test_rw_c6_one_hot_path():
    counts = sample_rw(cycle_graph(6), {3}, 2000, seed=3)
    assert counts.weights[class_id(3, 2)] == 2000


def test_rw_k5_only_complete_classes():
    counts = sample_rw(complete_graph(5), {3, 4, 5}, 3000, seed=4)
    hot = set(np.flatnonzero(counts.weights).tolist())
    assert hot == {class_id(3, 3), class_id(4, 6), class_id(5, 10)}


def test_rw_requires_connected():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    with pytest.raises(GraphError):
        sample_rw(g, {3}, 10, seed=0)


def test_rw_never_hits_disconnected_classes(rng):
    cat = build_catalog()
    disconnected = [c.id for c in cat.classes if not c.connected]
    for trial in range(10):
        g = random_connected_graph(rng, int(rng.integers(6, 16)))
        counts = sample_rw(g, {3, 4, 5}, 2000, seed=trial)
        assert counts.weights[disconnected].sum() == 0


def test_exact_k4_triangles():
    counts = enumerate_exact(complete_graph(4), {3})
    assert counts.weights[class_id(3, 3)] == 4  # C(4,3)


def test_exact_p4_disconnected_kept_and_dropped():
    both = enumerate_exact(path_graph(4), {3}, connected_only=False)
    assert both.weights[class_id(3, 2)] == 2
    assert both.weights[class_id(3, 1)] == 2
    conn = enumerate_exact(path_graph(4), {3}, connected_only=True)
    assert conn.weights[class_id(3, 1)] == 0
    assert conn.weights[class_id(3, 2)] == 2


def test_exact_c5_single_subset():
    from layoutkernel.catalog import classify
    from layoutkernel.graph import induced_subgraph

    c5 = cycle_graph(5)
    counts = enumerate_exact(c5, {5})
    cycle_class = classify(induced_subgraph(c5, range(5)))
    assert counts.weights[cycle_class] == 1
    assert counts.weights.sum() == 1


def test_exact_guard():
    assert enumeration_cost(200, {5}) > 10**8
    with pytest.raises(GraphError, match="sampling"):
        enumerate_exact(path_graph(200), {5})


@pytest.mark.parametrize("sampler", [sample_rv, sample_rw])
def test_sampler_determinism(rng, sampler):
    g = random_connected_graph(rng, 12)
    a = sampler(g, {3, 4}, 500, seed=99)
    b = sampler(g, {3, 4}, 500, seed=99)
    assert np.array_equal(a.weights, b.weights)
    c = sampler(g, {3, 4}, 500, seed=100)
    assert not np.array_equal(a.weights, c.weights)


def test_rv_unbiased_on_small_graph(rng):
    # C(9,5) = 126 <= 200 subsets: sampled concentration approaches exact.
    g = random_graph(rng, 9, 0.35)
    exact = enumerate_exact(g, {5}).concentration()
    sampled = sample_rv(g, {5}, 10**6, seed=5).concentration()
    assert np.max(np.abs(exact - sampled)) < 0.01


def test_sampler_enum_round_trip():
    assert Sampler("rv") is Sampler.RV
    assert Sampler("rw") is Sampler.RW
