import cvxpy as cp
import numpy as np
import pytest

from layoutkernel.svr import (
    SvrError,
    SvrModel,
    accuracy,
    cross_validate,
    predict_svr,
    svr_objective,
    train_svr,
)


def reference_objective(K, y, C, epsilon) -> float:
    """Independent dual optimum from a convex QP solver."""
    n = len(y)
    b = cp.Variable(n)
    objective = (
        0.5 * cp.quad_form(b, cp.psd_wrap(K)) - np.asarray(y) @ b + epsilon * cp.norm1(b)
    )
    problem = cp.Problem(cp.Minimize(objective), [cp.sum(b) == 0, b >= -C, b <= C])
    problem.solve()
    return float(problem.value)


def model_beta(model: SvrModel, n: int) -> np.ndarray:
    beta = np.zeros(n)
    beta[model.support_indices] = model.dual_coefs
    return beta


BLEND3 = np.full((3, 3), 0.1) + np.eye(3) * 0.9


def test_constant_targets_collapse_to_bias():
    K = np.full((5, 5), 0.2) + np.eye(5) * 0.8
    y = np.full(5, 0.7)
    model = train_svr(K, y, C=1.0, epsilon=0.1)
    assert len(model.dual_coefs) == 0
    assert model.bias == pytest.approx(0.7, abs=1e-12)
    assert predict_svr(model, K[0]) == pytest.approx(0.7, abs=1e-12)


def test_three_point_toy_matches_reference():
    y = np.array([0.0, 0.5, 1.0])
    model = train_svr(BLEND3, y, C=10.0, epsilon=0.01)
    beta = model_beta(model, 3)
    ours = svr_objective(BLEND3, y, beta, 0.01)
    reference = reference_objective(BLEND3, y, C=10.0, epsilon=0.01)
    assert ours <= reference + 1e-3
    for i in range(3):
        assert abs(predict_svr(model, BLEND3[i]) - y[i]) <= 0.01 + 1e-3


def test_rejects_nan_targets():
    with pytest.raises(SvrError):
        train_svr(np.eye(3), [0.1, np.nan, 0.5])


def test_rejects_shape_mismatch():
    with pytest.raises(SvrError):
        train_svr(np.eye(3), [0.1, 0.2])


def test_objective_matches_reference_on_small_instances(rng):
    for trial in range(12):
        n = int(rng.integers(3, 7))
        X = rng.standard_normal((n, 4))
        K = np.exp(-((X[:, None, :] - X[None, :, :]) ** 2).sum(-1) / 2.0)
        y = rng.random(n)
        C = float(rng.choice([0.5, 1.0, 10.0]))
        epsilon = float(rng.choice([0.0, 0.01, 0.1]))
        model = train_svr(K, y, C=C, epsilon=epsilon)
        ours = svr_objective(K, y, model_beta(model, n), epsilon)
        reference = reference_objective(K, y, C, epsilon)
        assert ours <= reference + 1e-3
        assert ours >= reference - 1e-6  # can't beat the optimum


def test_dual_feasibility_invariants(rng):
    for trial in range(8):
        n = int(rng.integers(5, 40))
        X = rng.standard_normal((n, 6))
        K = np.exp(-((X[:, None, :] - X[None, :, :]) ** 2).sum(-1) / 4.0)
        y = rng.random(n)
        C = 2.0
        model = train_svr(K, y, C=C, epsilon=0.05)
        beta = model_beta(model, n)
        assert np.all(np.abs(beta) <= C + 1e-9)
        assert beta.sum() == pytest.approx(0.0, abs=1e-9)


def test_predict_empty_support_returns_bias():
    model = SvrModel(np.array([], dtype=int), np.array([]), bias=0.42, C=1.0, epsilon=0.1)
    assert predict_svr(model, np.zeros(5)) == 0.42


def test_predict_row_too_short():
    model = SvrModel(np.array([4]), np.array([0.5]), bias=0.0, C=1.0, epsilon=0.1)
    with pytest.raises(SvrError):
        predict_svr(model, np.zeros(3))


def test_predict_linear_in_kernel_row(rng):
    model = SvrModel(np.array([0, 2, 3]), rng.standard_normal(3), bias=0.3, C=1.0, epsilon=0.1)
    r1, r2 = rng.random(5), rng.random(5)
    for a in (0.0, 0.3, 1.0):
        combined = a * r1 + (1 - a) * r2
        expected = (
            a * (predict_svr(model, r1) - model.bias)
            + (1 - a) * (predict_svr(model, r2) - model.bias)
            + model.bias
        )
        assert predict_svr(model, combined) == pytest.approx(expected)


def test_accuracy_cases():
    perfect = accuracy([0.1, 0.9], [0.1, 0.9])
    assert (perfect.rmse, perfect.r2) == (0.0, 1.0)
    zero_var = accuracy([0.0, 0.0], [1.0, 1.0])
    assert zero_var.rmse == 1.0
    assert zero_var.r2 is None and not zero_var.r2_defined
    mean_pred = accuracy([0.0, 2.0], [1.0, 1.0])
    assert mean_pred.rmse == 1.0
    assert mean_pred.r2 == 0.0
    with pytest.raises(SvrError):
        accuracy([1.0], [1.0, 2.0])


def test_cross_validate_twin_corpus_near_zero_rmse(rng):
    # Every row duplicated: an identical twin is always in the training fold.
    X = rng.standard_normal((12, 5))
    base = np.exp(-((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
    y_base = rng.random(12)
    idx = np.repeat(np.arange(12), 2)
    K = base[np.ix_(idx, idx)]
    y = y_base[idx]
    result = cross_validate(K, y, folds=8, repeats=2, C=50.0, epsilon=0.0, seed=3)
    assert result.mean_rmse < 0.05


def test_cross_validate_errors_and_partition():
    K = np.eye(3)
    with pytest.raises(SvrError):
        cross_validate(K, [1.0, 2.0, 3.0], folds=4, repeats=1)
    result = cross_validate(np.eye(3) * 0.5 + 0.5, [0.1, 0.2, 0.3], folds=2, repeats=1)
    assert result.fold_count == 2
    assert len(result.fold_rmse) == 2  # sizes 2 and 1


def test_cross_validate_deterministic(rng):
    K = np.exp(-np.abs(rng.standard_normal((10, 10))))
    K = (K + K.T) / 2
    np.fill_diagonal(K, 1.0)
    y = rng.random(10)
    a = cross_validate(K, y, folds=5, repeats=2, seed=11)
    b = cross_validate(K, y, folds=5, repeats=2, seed=11)
    assert a == b


def test_model_json_round_trip():
    model = SvrModel(np.array([1, 3]), np.array([0.2, -0.2]), bias=0.1, C=2.0, epsilon=0.05)
    again = SvrModel.from_json(model.to_json())
    assert np.array_equal(again.support_indices, model.support_indices)
    assert np.array_equal(again.dual_coefs, model.dual_coefs)
    assert (again.bias, again.C, again.epsilon) == (0.1, 2.0, 0.05)
