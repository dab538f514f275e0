"""Epsilon-insensitive support vector regression on precomputed kernels.

The dual is solved in terms of beta_i = alpha_i - alpha_i^*:

    minimize  0.5 * beta' K beta - y' beta + epsilon * ||beta||_1
    subject to  sum(beta) = 0,  -C <= beta_i <= C

by sequential two-coefficient optimization: the maximal KKT violator is
paired with the second-order best partner and the pair subproblem (an exact
piecewise quadratic in one variable) is solved in closed form. Also houses
the RMSE / R-squared accuracy helpers and the k-fold cross-validation
harness used to evaluate trained models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from layoutkernel.kernel import KernelConfig, KernelMatrix

_BOUND_EPS = 1e-9


class SvrError(ValueError):
    """Raised for invalid regression inputs."""


@dataclass
class SvrModel:
    support_indices: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    C: float
    epsilon: float
    kernel_config: KernelConfig | None = None
    target: tuple[str, str] | None = None

    def __post_init__(self) -> None:
        self.support_indices = np.asarray(self.support_indices, dtype=np.int64)
        self.dual_coefs = np.asarray(self.dual_coefs, dtype=np.float64)
        if self.support_indices.shape != self.dual_coefs.shape:
            raise SvrError("support_indices and dual_coefs must align")

    def to_json(self) -> dict:
        data = {
            "support_indices": self.support_indices.tolist(),
            "dual_coefs": self.dual_coefs.tolist(),
            "bias": self.bias,
            "C": self.C,
            "epsilon": self.epsilon,
        }
        if self.kernel_config is not None:
            data["kernel_config"] = self.kernel_config.to_json()
        if self.target is not None:
            data["target"] = list(self.target)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "SvrModel":
        return cls(
            support_indices=np.array(data["support_indices"], dtype=np.int64),
            dual_coefs=np.array(data["dual_coefs"], dtype=np.float64),
            bias=float(data["bias"]),
            C=float(data["C"]),
            epsilon=float(data["epsilon"]),
            kernel_config=(
                KernelConfig.from_json(data["kernel_config"])
                if "kernel_config" in data else None
            ),
            target=tuple(data["target"]) if "target" in data else None,
        )


def svr_objective(K: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float) -> float:
    """Dual objective value; the quantity the solver minimizes."""
    return float(0.5 * beta @ K @ beta - y @ beta + epsilon * np.abs(beta).sum())


def _bias_bounds(beta: np.ndarray, residual: np.ndarray, C: float, epsilon: float):
    """Per-row feasible interval [lower_i, upper_i] for the bias multiplier."""
    lower = np.full(len(beta), -np.inf)
    upper = np.full(len(beta), np.inf)
    at_upper = beta >= C - _BOUND_EPS
    at_lower = beta <= -C + _BOUND_EPS
    pos = (beta > _BOUND_EPS) & ~at_upper
    neg = (beta < -_BOUND_EPS) & ~at_lower
    zero = ~(at_upper | at_lower | pos | neg)
    upper[at_upper] = residual[at_upper] - epsilon
    lower[at_lower] = residual[at_lower] + epsilon
    lower[pos] = upper[pos] = residual[pos] - epsilon
    lower[neg] = upper[neg] = residual[neg] + epsilon
    lower[zero] = residual[zero] - epsilon
    upper[zero] = residual[zero] + epsilon
    return lower, upper


def _pair_step(K, beta, grad, i, j, C, epsilon):
    """Exact minimizer of the pair subproblem beta_i += t, beta_j -= t.

    Returns the step t and its objective change (0, 0) when no descent
    direction exists.
    """
    t_lo = max(-C - beta[i], beta[j] - C)
    t_hi = min(C - beta[i], beta[j] + C)
    if t_hi <= t_lo:
        return 0.0, 0.0
    eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    g = grad[i] - grad[j]
    cuts = sorted({t_lo, t_hi, min(max(-beta[i], t_lo), t_hi), min(max(beta[j], t_lo), t_hi)})
    candidates = set(cuts)
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        slope_l1 = epsilon * (math.copysign(1.0, beta[i] + mid)
                              - math.copysign(1.0, beta[j] - mid))
        if eta > 1e-14:
            candidates.add(min(max(-(g + slope_l1) / eta, a), b))
    best_t, best_delta = 0.0, 0.0
    bi, bj = beta[i], beta[j]
    for t in candidates:
        delta = (
            t * g + 0.5 * eta * t * t
            + epsilon * (abs(bi + t) - abs(bi) + abs(bj - t) - abs(bj))
        )
        if delta < best_delta:
            best_t, best_delta = t, delta
    return best_t, best_delta


def train_svr(
    K: KernelMatrix | np.ndarray,
    targets,
    C: float = 1.0,
    epsilon: float = 0.1,
    tolerance: float = 1e-3,
    max_passes: int | None = None,
    seed: int = 0,
) -> SvrModel:
    """Fit the dual on a precomputed kernel matrix.

    One pass is one working-pair optimization; ``max_passes`` defaults to
    10 * order, which in practice is far past convergence. The bias is the
    average over free support vectors of their exact-boundary value, falling
    back to the midpoint of the feasible multiplier interval.
    """
    kernel_config = K.config if isinstance(K, KernelMatrix) else None
    km = K.entries if isinstance(K, KernelMatrix) else np.asarray(K, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    n = len(y)
    if km.shape != (n, n):
        raise SvrError(f"kernel order {km.shape} does not match {n} targets")
    if n < 2:
        raise SvrError("training needs at least 2 rows")
    if not np.all(np.isfinite(y)):
        raise SvrError("targets must be finite")
    if C <= 0:
        raise SvrError("C must be > 0")
    if epsilon < 0:
        raise SvrError("epsilon must be >= 0")
    if max_passes is None:
        max_passes = 10 * n
    rng = np.random.default_rng(seed)
    beta = np.zeros(n)
    grad = -y.copy()  # gradient of the smooth part, K beta - y
    for _ in range(max_passes):
        residual = -grad
        lower, upper = _bias_bounds(beta, residual, C, epsilon)
        i = int(np.argmax(lower))
        violation = lower[i] - upper.min()
        if violation < tolerance:
            break
        gap = lower[i] - upper
        eligible = gap > 0.0
        eligible[i] = False
        if not eligible.any():
            break
        eta = np.maximum(km[i, i] + np.diag(km) - 2.0 * km[i], 1e-12)
        gain = np.where(eligible, gap**2 / eta, -np.inf)
        j = int(np.argmax(gain))
        t, delta = _pair_step(km, beta, grad, i, j, C, epsilon)
        if delta >= 0.0:
            # Degenerate pair; sweep random partners for a descent step.
            moved = False
            for j in rng.permutation(np.flatnonzero(eligible)):
                t, delta = _pair_step(km, beta, grad, i, int(j), C, epsilon)
                if delta < 0.0:
                    j = int(j)
                    moved = True
                    break
            if not moved:
                break
        beta[i] += t
        beta[j] -= t
        grad += t * (km[:, i] - km[:, j])
    residual = -grad
    free = (np.abs(beta) > _BOUND_EPS) & (np.abs(beta) < C - _BOUND_EPS)
    if free.any():
        bias = float(np.mean(residual[free] - epsilon * np.sign(beta[free])))
    else:
        lower, upper = _bias_bounds(beta, residual, C, epsilon)
        lo, hi = lower.max(), upper.min()
        if not np.isfinite(lo):
            lo = hi
        if not np.isfinite(hi):
            hi = lo
        bias = float(0.5 * (lo + hi))
    support = np.flatnonzero(beta != 0.0)
    return SvrModel(
        support_indices=support,
        dual_coefs=beta[support],
        bias=bias,
        C=C,
        epsilon=epsilon,
        kernel_config=kernel_config,
    )


def predict_svr(model: SvrModel, kernel_row: np.ndarray) -> float:
    """Sum of dual coefficients times the row similarities, plus bias."""
    row = np.asarray(kernel_row, dtype=np.float64)
    if len(model.support_indices) and row.shape[0] <= int(model.support_indices.max()):
        raise SvrError(
            f"kernel row of length {row.shape[0]} does not cover support index "
            f"{int(model.support_indices.max())}"
        )
    return float(model.dual_coefs @ row[model.support_indices] + model.bias)


@dataclass
class Accuracy:
    rmse: float
    r2: float | None  # None when the targets have zero variance

    @property
    def r2_defined(self) -> bool:
        return self.r2 is not None


def accuracy(y, y_hat) -> Accuracy:
    """Root-mean-square error and coefficient of determination."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1 or len(y) == 0:
        raise SvrError("accuracy needs two equal-length nonempty 1-D arrays")
    sq = (y - y_hat) ** 2
    rmse = math.sqrt(float(sq.mean()))
    denom = float(((y - y.mean()) ** 2).sum())
    if denom == 0.0:
        return Accuracy(rmse=rmse, r2=None)
    return Accuracy(rmse=rmse, r2=1.0 - float(sq.sum()) / denom)


@dataclass
class CvResult:
    """Cross-validation summary for one target series."""

    mean_rmse: float
    mean_r2: float | None
    fold_count: int
    repeat_count: int
    seed: int
    fold_rmse: list[float] = field(default_factory=list)
    fold_r2: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mean_rmse": self.mean_rmse,
            "mean_r2": self.mean_r2,
            "fold_count": self.fold_count,
            "repeat_count": self.repeat_count,
            "seed": self.seed,
            "fold_rmse": self.fold_rmse,
            "fold_r2": self.fold_r2,
        }


def cross_validate(
    K: KernelMatrix | np.ndarray,
    targets,
    folds: int = 10,
    repeats: int = 10,
    C: float = 1.0,
    epsilon: float = 0.1,
    tolerance: float = 1e-3,
    seed: int = 0,
) -> CvResult:
    """Repeated k-fold cross-validation over a precomputed kernel.

    Each repeat shuffles the row order with its own derived seed and splits
    into near-equal folds; held-out rows are predicted from their kernel rows
    against the training rows. Folds whose held-out targets have zero
    variance are skipped in the R-squared mean.
    """
    km = K.entries if isinstance(K, KernelMatrix) else np.asarray(K, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    n = len(y)
    if folds < 2:
        raise SvrError("folds must be >= 2")
    if folds > n:
        raise SvrError(f"folds={folds} exceeds {n} rows")
    if repeats < 1:
        raise SvrError("repeats must be >= 1")
    fold_rmse: list[float] = []
    fold_r2: list[float] = []
    for rep in range(repeats):
        rng = np.random.default_rng(seed + rep)
        order = rng.permutation(n)
        for part in np.array_split(order, folds):
            test = np.sort(part)
            train = np.setdiff1d(order, test)
            if len(train) < 2:
                # Degenerate fold layout (e.g. 2 folds over 3 rows): fall back
                # to the constant predictor instead of fitting.
                preds = [float(y[train].mean())] * len(test)
            else:
                model = train_svr(
                    km[np.ix_(train, train)], y[train],
                    C=C, epsilon=epsilon, tolerance=tolerance, seed=seed + rep,
                )
                preds = [predict_svr(model, km[t, train]) for t in test]
            acc = accuracy(y[test], preds)
            fold_rmse.append(acc.rmse)
            if acc.r2 is not None:
                fold_r2.append(acc.r2)
    return CvResult(
        mean_rmse=float(np.mean(fold_rmse)),
        mean_r2=float(np.mean(fold_r2)) if fold_r2 else None,
        fold_count=folds,
        repeat_count=repeats,
        seed=seed,
        fold_rmse=fold_rmse,
        fold_r2=fold_r2,
    )
