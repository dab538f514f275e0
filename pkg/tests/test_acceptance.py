"""Acceptance suite: one test per criterion, at the stated tolerances.

Criteria 8, 9, and 11 share a 200-graph synthetic corpus store built once
per session. The conftest terminal-summary hook prints one PASS/FAIL line
per criterion at the end of the run.
"""

import time
from collections import Counter

import numpy as np
import pytest

from layoutkernel.catalog import build_catalog, classify
from layoutkernel.corpus import (
    estimate_metrics,
    evaluate,
    generate_synthetic_corpus,
    precompute_all,
    train_models,
    upload_features,
)
from layoutkernel.generators import CorpusSpec
from layoutkernel.graph import Graph, SmallGraph, induced_subgraph
from layoutkernel.kernel import (
    FeatureVector,
    InnerKind,
    KernelConfig,
    Scaling,
    compute_features,
    kernel_matrix,
    kernel_row,
    parse_kernel_name,
    scale,
)
from layoutkernel.layouts import Layout, LayoutMethod, layout_fr
from layoutkernel.metrics import (
    count_crossings,
    gabriel_graph,
    mean_jaccard,
    metric_crosslessness,
    metric_edge_length_variation,
    metric_min_angle,
    metric_shape,
)
from layoutkernel.sampling import Sampler, enumerate_exact, sample_rv, sample_rw
from layoutkernel.similar import CorpusEntry, find_similar
from layoutkernel.svr import cross_validate, predict_svr, train_svr, svr_objective
from tests.conftest import random_connected_graph, random_graph
from tests.test_metrics import oracle_crossings
from tests.test_svr import model_beta, reference_objective

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")

CORPUS_SEED = 2024
CV_SEED = 7
SVR_PARAMS = {"C": 10.0, "epsilon": 0.01}


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture(scope="module")
def corpus_store(tmp_path_factory):
    """Criterion 8/9/11 corpus: 200 graphs, trees vs denser G(n, p)."""
    root = tmp_path_factory.mktemp("acceptance") / "store"
    spec = CorpusSpec.parse("tree:100:100-400,gnp:100:100-400:p=0.05")
    store = generate_synthetic_corpus(
        spec, seed=CORPUS_SEED, root=root,
        kernel_config=parse_kernel_name("rw-log-laplacian"),
    )
    summary = precompute_all(store, ["fr"], fr_iterations=150)
    assert summary.features_done == 200
    assert not [f for f in summary.failures if f["stage"] == "features"]
    train_models(store, **SVR_PARAMS)
    return store


@pytest.fixture(scope="module")
def cv_report(corpus_store):
    return evaluate(corpus_store, folds=10, repeats=3, seed=CV_SEED, **SVR_PARAMS)


def test_c01_catalog_counts():
    started = time.perf_counter()
    cat = build_catalog()
    by_size = Counter(c.size for c in cat.classes)
    assert len(cat.classes) == 49
    assert (by_size[3], by_size[4], by_size[5]) == (4, 11, 34)
    connected = Counter(c.size for c in cat.classes if c.connected)
    assert len(cat.connected_ids) == 29
    assert (connected[3], connected[4], connected[5]) == (2, 6, 21)
    assert time.perf_counter() - started < 1.0


def test_c02_isomorphism_soundness(rng):
    started = time.perf_counter()
    cat = build_catalog()
    classes_seen = {classify(SmallGraph(5, bits), cat) for bits in range(1 << 10)}
    assert len(classes_seen) == 34
    from tests.test_catalog import _permute_bits

    for _ in range(1000):
        k = int(rng.choice([3, 4, 5]))
        bits = int(rng.integers(1 << (k * (k - 1) // 2)))
        perm = list(rng.permutation(k))
        relabeled = _permute_bits(k, bits, perm)
        assert classify(SmallGraph(k, bits), cat) == classify(SmallGraph(k, relabeled), cat)
    assert time.perf_counter() - started < 10.0


def test_c03_rv_unbiasedness():
    started = time.perf_counter()
    for seed in range(10):
        g = random_graph(np.random.default_rng(seed), 30, 0.2)
        sampled = sample_rv(g, {3, 4, 5}, 10**6, seed=seed)
        exact = enumerate_exact(g, {3, 4, 5})
        gap = np.abs(
            sampled.size_balanced_concentration() - exact.size_balanced_concentration()
        ).max()
        assert gap < 0.01, f"seed {seed}: L_inf {gap}"
    assert time.perf_counter() - started < 120.0


def test_c04_rw_support_and_convergence():
    started = time.perf_counter()
    cat = build_catalog()
    disconnected = [c.id for c in cat.classes if not c.connected]
    path3 = next(c.id for c in cat.classes if c.size == 3 and c.edge_count == 2)
    c6 = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    counts = sample_rw(c6, {3}, 5000, seed=1)
    assert counts.weights[path3] == 5000  # C6 has no triangles: all 3-sets are paths
    k5 = complete_graph(5)
    counts = sample_rw(k5, {3, 4, 5}, 6000, seed=2)
    complete_ids = {
        next(c.id for c in cat.classes if c.size == k and c.edge_count == k * (k - 1) // 2)
        for k in (3, 4, 5)
    }
    assert set(np.flatnonzero(counts.weights).tolist()) == complete_ids
    rng = np.random.default_rng(3)
    g = random_connected_graph(rng, 30, extra_p=0.3)
    half = sample_rw(g, {3}, 50_000, seed=4)
    full = sample_rw(g, {3}, 100_000, seed=5)
    assert half.weights[disconnected].sum() == 0
    assert full.weights[disconnected].sum() == 0
    gap = np.abs(half.concentration() - full.concentration()).max()
    assert gap < 0.01
    assert time.perf_counter() - started < 120.0


def test_c05_metric_oracles(rng):
    started = time.perf_counter()
    square = Layout(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
                    LayoutMethod.IMPORTED)
    k4 = complete_graph(4)
    assert metric_crosslessness(k4, square) == pytest.approx(2 / 3, abs=1e-9)
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert metric_crosslessness(star, square) == pytest.approx(1.0, abs=1e-9)
    triangle = complete_graph(3)
    equilateral = Layout(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]]),
                         LayoutMethod.IMPORTED)
    assert metric_min_angle(triangle, equilateral) == pytest.approx(1 / 3, abs=1e-9)
    two_edges = Graph.from_edges(3, [(0, 1), (1, 2)])
    lengths13 = Layout(np.array([[0.0, 0.0], [1.0, 0.0], [4.0, 0.0]]), LayoutMethod.IMPORTED)
    assert metric_edge_length_variation(two_edges, lengths13) == pytest.approx(0.5, abs=1e-9)
    assert gabriel_graph(square.positions).edges.tolist() == [[0, 1], [0, 3], [1, 2], [2, 3]]
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert mean_jaccard(triangle, path) == pytest.approx(2 / 3, abs=1e-9)
    assert metric_shape(k4, square) == pytest.approx(2 / 3, abs=1e-9)
    for _ in range(100):
        g = random_connected_graph(rng, int(rng.integers(4, 10)), extra_p=0.3)
        layout = Layout(rng.random((g.vertex_count, 2)), LayoutMethod.IMPORTED)
        assert count_crossings(g, layout) == oracle_crossings(g, layout)
    assert time.perf_counter() - started < 60.0


def test_c06_kernel_invariants(rng):
    started = time.perf_counter()
    features = {Scaling.LOG: [], Scaling.LIN: []}
    for i in range(50):
        g = random_connected_graph(rng, int(rng.integers(8, 24)), extra_p=0.25)
        counts = sample_rw(g, {3, 4, 5}, 600, seed=i)
        for scaling in features:
            features[scaling].append(scale(counts, scaling))
    for kind in InnerKind:
        scaling = Scaling.LIN if kind == InnerKind.COS else Scaling.LOG
        config = KernelConfig(inner=kind, scaling=scaling)
        km = kernel_matrix(features[scaling], config)
        assert np.array_equal(km.entries, km.entries.T)
        assert np.all(np.diag(km.entries) == 1.0)
        assert np.linalg.eigvalsh(km.entries).min() >= -1e-8
        x = features[scaling][0]
        assert kernel_row(x, [x], km.config)[0] == 1.0
    assert time.perf_counter() - started < 60.0


def test_c07_svr_correctness(rng):
    started = time.perf_counter()
    for trial in range(10):
        n = int(rng.integers(3, 7))
        x = rng.standard_normal((n, 4))
        K = np.exp(-((x[:, None, :] - x[None, :, :]) ** 2).sum(-1) / 2.0)
        y = rng.random(n)
        C = float(rng.choice([0.5, 1.0, 10.0]))
        epsilon = float(rng.choice([0.0, 0.01, 0.1]))
        model = train_svr(K, y, C=C, epsilon=epsilon)
        ours = svr_objective(K, y, model_beta(model, n), epsilon)
        assert ours <= reference_objective(K, y, C, epsilon) + 1e-3
    K = np.full((5, 5), 0.3) + np.eye(5) * 0.7
    model = train_svr(K, np.full(5, 0.7), C=1.0, epsilon=0.1)
    assert predict_svr(model, K[3]) == pytest.approx(0.7, abs=1e-9)
    assert time.perf_counter() - started < 60.0


def test_c08_end_to_end_learning_signal(cv_report):
    for metric in ("m_l", "m_c"):
        result = cv_report.results[("fr", metric)]
        assert result.mean_r2 is not None
        assert result.mean_r2 > 0.5, f"{metric}: R^2 {result.mean_r2}"


def test_c09_kernel_ordering(corpus_store, cv_report):
    rv_config = parse_kernel_name("rv-lin-cos")
    ids = [gid for gid in corpus_store.graph_ids()
           if corpus_store.has_metrics(gid, "fr")]
    features = []
    for index, gid in enumerate(corpus_store.graph_ids()):
        if gid not in set(ids):
            continue
        g = corpus_store.load_graph(gid)
        counts = sample_rv(g, {3, 4, 5}, rv_config.sample_count,
                           seed=(CORPUS_SEED ^ index) & 0x7FFFFFFF)
        features.append(compute_features(counts, rv_config))
    km = kernel_matrix(features, rv_config)
    records = [corpus_store.load_metrics(gid, "fr") for gid in ids]
    rv_rmse, rw_rmse = [], []
    for metric in ("m_c", "m_a", "m_l", "m_s"):
        targets = np.array([getattr(r, metric) for r in records])
        rv_cv = cross_validate(km, targets, folds=10, repeats=3, seed=CV_SEED, **SVR_PARAMS)
        rv_rmse.append(rv_cv.mean_rmse)
        rw_rmse.append(cv_report.results[("fr", metric)].mean_rmse)
    assert np.mean(rw_rmse) < np.mean(rv_rmse), (rw_rmse, rv_rmse)


def test_c10_wgl_retrieval(rng):
    started = time.perf_counter()
    config = KernelConfig(sampler=Sampler.RV, scaling=Scaling.LIN, inner=InnerKind.COS)
    base = random_connected_graph(np.random.default_rng(41), 9, extra_p=0.3)
    perm = list(np.random.default_rng(42).permutation(9))
    remap = {old: new for old, new in enumerate(perm)}
    twin = Graph.from_edges(9, [(remap[u], remap[v]) for u, v in base.edges.tolist()])
    feats = {}
    entries = []
    for name, g in [("base", base), ("twin", twin)]:
        feats[name] = compute_features(enumerate_exact(g, {3, 4, 5}), config)
    entries.append(CorpusEntry("twin", feats["twin"], twin.vertex_count))
    for i in range(5):
        g = random_connected_graph(rng, 9, extra_p=0.4)
        entries.append(CorpusEntry(f"other{i}",
                                   compute_features(enumerate_exact(g, {3, 4, 5}), config), 9))
    results = find_similar(feats["base"], base.vertex_count, entries, k=3, config=config)
    assert results[0].graph_id == "twin"
    assert results[0].similarity == 1.0
    assert results[0].rank == 1
    # Strict size window around a 100-vertex query.
    dummy = FeatureVector(np.array([1.0]))
    window_corpus = [CorpusEntry(f"n{n}", dummy, n) for n in (50, 51, 199, 200)]
    admitted = find_similar(dummy, 100, window_corpus, k=10, config=config)
    assert sorted(r.graph_id for r in admitted) == ["n199", "n51"]
    assert time.perf_counter() - started < 10.0


def test_c11_estimation_beats_layout(corpus_store):
    rng = np.random.default_rng(9)
    n = 50_000
    parents = rng.integers(0, np.arange(1, n))
    edges = {(int(p), i) for i, p in enumerate(parents, start=1)}
    extra = rng.integers(0, n, size=(n, 2))
    for u, v in extra.tolist():
        if u != v:
            edges.add((min(u, v), max(u, v)))
    g = Graph.from_edges(n, edges)

    started = time.perf_counter()
    features = upload_features(corpus_store, g)
    estimates = estimate_metrics(corpus_store, g, "fr", features=features)
    estimation_time = time.perf_counter() - started
    assert set(estimates) == {"m_c", "m_a", "m_l", "m_s"}
    assert estimation_time < 5.0, f"estimation took {estimation_time:.2f}s"

    started = time.perf_counter()
    layout_fr(g, 500, seed=1)
    layout_time = time.perf_counter() - started
    assert layout_time >= 10.0 * estimation_time, (layout_time, estimation_time)
