import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layoutkernel.kernel import (
    MEDIAN_HEURISTIC,
    FeatureVector,
    InnerKind,
    KernelConfig,
    Scaling,
    compute_features,
    inner,
    kernel_matrix,
    kernel_row,
    parse_kernel_name,
    scale,
    scale_weights,
    sigma_median,
)
from layoutkernel.sampling import sample_rv, sample_rw
from tests.conftest import random_connected_graph


def fv(*values):
    return FeatureVector(np.array(values, dtype=float))


def test_lin_one_hot():
    w = np.zeros(49)
    w[7] = 123.0
    x = scale_weights(w, Scaling.LIN)
    assert x[7] == 1.0
    assert x.sum() == 1.0


def test_log_two_slot_toy():
    x = scale_weights(np.array([9.0, 0.0]), Scaling.LOG, base_weight=1.0)
    assert x == pytest.approx([math.log(10 / 11), math.log(1 / 11)])
    assert x == pytest.approx([-0.0953, -2.3979], abs=1e-4)


def test_lin_all_zero_errors():
    with pytest.raises(ValueError):
        scale_weights(np.zeros(49), Scaling.LIN)


def test_scale_dimensions(rng):
    g = random_connected_graph(rng, 12)
    rv = scale(sample_rv(g, {3, 4, 5}, 1000, seed=1), Scaling.LIN)
    rw = scale(sample_rw(g, {3, 4, 5}, 1000, seed=1), Scaling.LOG)
    assert rv.dimension == 49
    assert rw.dimension == 29


@given(st.lists(st.floats(0, 1e6), min_size=2, max_size=49), st.floats(0.1, 10))
@settings(max_examples=80)
def test_scaling_invariants(weights, w_b):
    w = np.array(weights)
    if w.sum() > 0:
        lin = scale_weights(w, Scaling.LIN)
        assert np.all(lin >= 0)
        assert lin.sum() == pytest.approx(1.0)
    log = scale_weights(w, Scaling.LOG, w_b)
    assert np.all(log < 0)
    assert np.exp(log).sum() == pytest.approx(1.0)


def test_self_similarity_exactly_one():
    x = fv(0.3, 0.4, 0.1)
    for kind in InnerKind:
        assert inner(x, FeatureVector(x.values.copy()), kind, sigma=2.0) == 1.0


def test_cos_hand_value():
    assert inner(fv(1, 1, 0), fv(1, 0, 0), InnerKind.COS) == pytest.approx(1 / math.sqrt(2))


def test_rbf_and_laplacian_hand_values():
    sigma = 0.7
    x = fv(0.0)
    y = fv(math.sqrt(2) * sigma)  # squared distance 2 sigma^2
    assert inner(x, y, InnerKind.RBF, sigma) == pytest.approx(math.exp(-1))
    z = fv(sigma)  # L1 distance sigma
    assert inner(x, z, InnerKind.LAPLACIAN, sigma) == pytest.approx(math.exp(-1))


def test_inner_errors():
    with pytest.raises(ValueError):
        inner(fv(0, 0), fv(1, 0), InnerKind.COS)
    with pytest.raises(ValueError):
        inner(fv(1, 0), fv(1, 0, 0), InnerKind.COS)
    with pytest.raises(ValueError):
        inner(fv(1, 0), fv(0, 1), InnerKind.RBF, sigma=None)


def test_sigma_median_cases():
    assert sigma_median([fv(1, 2), fv(1, 2), fv(1, 2)], InnerKind.RBF) == 1.0
    assert sigma_median([fv(0), fv(2)], InnerKind.RBF) == 2.0
    assert sigma_median([fv(0), fv(1), fv(10)], InnerKind.LAPLACIAN) == 9.0
    with pytest.raises(ValueError):
        sigma_median([fv(0)], InnerKind.RBF)


def test_kernel_matrix_trivial_cases():
    config = KernelConfig(inner=InnerKind.RBF, sigma=1.0)
    single = kernel_matrix([fv(0.2, 0.8)], config)
    assert single.entries.tolist() == [[1.0]]
    triple = kernel_matrix([fv(0.2, 0.8)] * 3, config)
    assert np.array_equal(triple.entries, np.ones((3, 3)))


def _random_features(rng, count, kind):
    feats = []
    for i in range(count):
        g = random_connected_graph(rng, int(rng.integers(8, 20)))
        counts = sample_rw(g, {3, 4, 5}, 500, seed=i)
        scaling = Scaling.LOG if kind != InnerKind.COS else Scaling.LIN
        feats.append(scale(counts, scaling))
    return feats


@pytest.mark.parametrize("kind", list(InnerKind))
def test_kernel_matrix_invariants(rng, kind):
    feats = _random_features(rng, 50, kind)
    config = KernelConfig(inner=kind, scaling=Scaling.LOG)
    km = kernel_matrix(feats, config)
    assert np.array_equal(km.entries, km.entries.T)  # bit-for-bit symmetry
    assert np.all(np.diag(km.entries) == 1.0)
    if kind == InnerKind.COS:
        assert np.all(km.entries >= -1 - 1e-12) and np.all(km.entries <= 1 + 1e-12)
    else:
        assert np.all(km.entries > 0) and np.all(km.entries <= 1)
    eigenvalues = np.linalg.eigvalsh(km.entries)
    assert eigenvalues.min() >= -1e-8


def test_kernel_row_consistency(rng):
    feats = _random_features(rng, 8, InnerKind.LAPLACIAN)
    config = KernelConfig(inner=InnerKind.LAPLACIAN).resolved(feats)
    row = kernel_row(feats[-1], feats[:-1], config)
    km = kernel_matrix(feats, config)
    assert row == pytest.approx(km.entries[-1, :-1])
    assert kernel_row(feats[0], [feats[0]], config)[0] == 1.0
    assert kernel_row(feats[0], [], config).tolist() == []


def test_kernel_row_needs_resolved_sigma():
    with pytest.raises(ValueError):
        kernel_row(fv(1.0), [fv(0.5)], KernelConfig(inner=InnerKind.RBF))


def test_parse_kernel_names():
    config = parse_kernel_name("rw-log-laplacian")
    assert config.name == "rw-log-laplacian"
    assert config.scaling is Scaling.LOG
    config = parse_kernel_name("rv-lin-cos")
    assert config.name == "rv-lin-cos"
    with pytest.raises(ValueError):
        parse_kernel_name("rw-log")
    with pytest.raises(ValueError):
        parse_kernel_name("rw-log-sigmoid")


def test_config_json_round_trip():
    config = KernelConfig(sample_count=5000, sigma=2.5)
    assert KernelConfig.from_json(config.to_json()) == config
    heuristic = KernelConfig()
    assert heuristic.sigma == MEDIAN_HEURISTIC
    assert KernelConfig.from_json(heuristic.to_json()) == heuristic


def test_features_from_counts(rng):
    g = random_connected_graph(rng, 10)
    config = KernelConfig()
    vec = compute_features(sample_rw(g, {3, 4, 5}, config.sample_count, 3), config)
    assert vec.dimension == 29
    assert np.exp(vec.values).sum() == pytest.approx(1.0)
