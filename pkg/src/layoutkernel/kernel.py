"""Feature scaling and kernel functions over graphlet count vectors.

A kernel is named by a sampler-scaling-inner triple, e.g. "rw-log-laplacian".
RW features live on the 29 connected-class slots (in catalog order); RV and
exact features use all 49 class slots. Self-similarity is exactly 1 for every
inner kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist

from layoutkernel.catalog import build_catalog
from layoutkernel.sampling import GraphletCounts, Sampler


class Scaling(str, Enum):
    LIN = "lin"
    LOG = "log"


class InnerKind(str, Enum):
    COS = "cos"
    RBF = "rbf"
    LAPLACIAN = "laplacian"


MEDIAN_HEURISTIC = "median"


@dataclass(frozen=True)
class KernelConfig:
    sampler: Sampler = Sampler.RW
    sample_count: int = 10_000
    scaling: Scaling = Scaling.LOG
    base_weight: float = 1.0
    inner: InnerKind = InnerKind.LAPLACIAN
    sigma: float | str = MEDIAN_HEURISTIC

    def __post_init__(self) -> None:
        if self.base_weight <= 0:
            raise ValueError("base_weight must be > 0")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if isinstance(self.sigma, str):
            if self.sigma != MEDIAN_HEURISTIC:
                raise ValueError(f"sigma must be a number or {MEDIAN_HEURISTIC!r}")
        elif self.sigma <= 0:
            raise ValueError("sigma must be > 0")

    @property
    def name(self) -> str:
        return f"{self.sampler.value}-{self.scaling.value}-{self.inner.value}"

    def resolved(self, features: list["FeatureVector"]) -> "KernelConfig":
        """Expand a median-heuristic sigma against concrete features."""
        if self.sigma != MEDIAN_HEURISTIC:
            return self
        return replace(self, sigma=sigma_median(features, self.inner))

    def to_json(self) -> dict:
        return {
            "sampler": self.sampler.value,
            "sample_count": self.sample_count,
            "scaling": self.scaling.value,
            "base_weight": self.base_weight,
            "inner": self.inner.value,
            "sigma": self.sigma,
        }

    @classmethod
    def from_json(cls, data: dict) -> "KernelConfig":
        return cls(
            sampler=Sampler(data["sampler"]),
            sample_count=int(data["sample_count"]),
            scaling=Scaling(data["scaling"]),
            base_weight=float(data["base_weight"]),
            inner=InnerKind(data["inner"]),
            sigma=data["sigma"] if data["sigma"] == MEDIAN_HEURISTIC else float(data["sigma"]),
        )


def parse_kernel_name(name: str) -> KernelConfig:
    """Parse a sampler-scaling-inner triple like "rw-log-laplacian"."""
    parts = name.lower().split("-")
    if len(parts) != 3:
        raise ValueError(f"kernel name must be sampler-scaling-inner, got {name!r}")
    try:
        return KernelConfig(
            sampler=Sampler(parts[0]), scaling=Scaling(parts[1]), inner=InnerKind(parts[2])
        )
    except ValueError as exc:
        raise ValueError(f"unknown kernel name {name!r}: {exc}") from exc


@dataclass(frozen=True)
class FeatureVector:
    """Scaled graphlet frequency vector; 49 slots (RV/exact) or 29 (RW)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.ndim != 1:
            raise ValueError("feature vector must be 1-D")

    @property
    def dimension(self) -> int:
        return len(self.values)

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "values": self.values.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "FeatureVector":
        return cls(np.array(data["values"], dtype=np.float64))


def scale_weights(weights: np.ndarray, scaling: Scaling, base_weight: float = 1.0) -> np.ndarray:
    """LIN: w_i / sum(w). LOG: log((w_i + w_b) / sum_j(w_j + w_b))."""
    w = np.asarray(weights, dtype=np.float64)
    if scaling == Scaling.LIN:
        total = w.sum()
        if total == 0:
            raise ValueError("linear scaling undefined for all-zero weights")
        return w / total
    if base_weight <= 0:
        raise ValueError("base_weight must be > 0")
    shifted = w + base_weight
    return np.log(shifted / shifted.sum())


def scale(counts: GraphletCounts, scaling: Scaling, base_weight: float = 1.0) -> FeatureVector:
    """Scale counts into a feature vector on the sampler's slot set."""
    if counts.sampler == Sampler.RW:
        slots = np.array(build_catalog().connected_ids)
        weights = counts.weights[slots]
    else:
        weights = counts.weights
    return FeatureVector(scale_weights(weights, scaling, base_weight))


def compute_features(counts: GraphletCounts, config: KernelConfig) -> FeatureVector:
    return scale(counts, config.scaling, config.base_weight)


def inner(
    x: FeatureVector, y: FeatureVector, kind: InnerKind, sigma: float | None = None
) -> float:
    """Similarity of two feature vectors; exactly 1.0 for equal inputs."""
    a, b = x.values, y.values
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if np.array_equal(a, b):
        return 1.0
    if kind == InnerKind.COS:
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0 or nb == 0:
            raise ValueError("cosine similarity undefined for a zero vector")
        return float(a @ b / (na * nb))
    if sigma is None or not isinstance(sigma, (int, float)) or sigma <= 0:
        raise ValueError("rbf/laplacian kernels need sigma > 0")
    if kind == InnerKind.RBF:
        d2 = float(np.sum((a - b) ** 2))
        return float(np.exp(-d2 / (2.0 * sigma**2)))
    d1 = float(np.sum(np.abs(a - b)))
    return float(np.exp(-d1 / sigma))


def sigma_median(features: list[FeatureVector], kind: InnerKind) -> float:
    """Median pairwise distance (L2 for RBF/COS, L1 for Laplacian); 1.0 if 0."""
    if len(features) < 2:
        raise ValueError("median heuristic needs at least 2 feature vectors")
    x = np.stack([f.values for f in features])
    metric = "cityblock" if kind == InnerKind.LAPLACIAN else "euclidean"
    med = float(np.median(pdist(x, metric=metric)))
    return med if med > 0 else 1.0


@dataclass
class KernelMatrix:
    entries: np.ndarray
    config: KernelConfig

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("kernel matrix must be square")

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def submatrix(self, rows: np.ndarray) -> np.ndarray:
        return self.entries[np.ix_(rows, rows)]


def _pairwise(values: np.ndarray, kind: InnerKind, sigma: float | None) -> np.ndarray:
    if kind == InnerKind.COS:
        norms = np.linalg.norm(values, axis=1)
        if np.any(norms == 0):
            raise ValueError("cosine similarity undefined for a zero vector")
        unit = values / norms[:, None]
        return unit @ unit.T
    if sigma is None or not isinstance(sigma, (int, float)) or sigma <= 0:
        raise ValueError("rbf/laplacian kernels need sigma > 0")
    if kind == InnerKind.RBF:
        return np.exp(-cdist(values, values, "sqeuclidean") / (2.0 * sigma**2))
    return np.exp(-cdist(values, values, "cityblock") / sigma)


def kernel_matrix(features: list[FeatureVector], config: KernelConfig) -> KernelMatrix:
    """Pairwise similarity matrix; upper triangle mirrored, unit diagonal.

    Identical feature vectors get similarity exactly 1, matching the scalar
    ``inner`` and the self-similarity normalization.
    """
    config = config.resolved(features)
    dims = {f.dimension for f in features}
    if len(dims) > 1:
        raise ValueError(f"feature dimensions differ: {sorted(dims)}")
    values = np.stack([f.values for f in features])
    km = _pairwise(values, config.inner, config.sigma)
    upper = np.triu(km, k=1)
    km = upper + upper.T
    _, inverse = np.unique(values, axis=0, return_inverse=True)
    km[inverse[:, None] == inverse[None, :]] = 1.0
    return KernelMatrix(km, config)


def kernel_row(
    query: FeatureVector, corpus: list[FeatureVector], config: KernelConfig
) -> np.ndarray:
    """Similarities of one query against a feature list, in corpus order.

    ``config.sigma`` must already be the value frozen at training time.
    """
    if config.sigma == MEDIAN_HEURISTIC and config.inner != InnerKind.COS:
        raise ValueError("sigma must be resolved before computing kernel rows")
    return np.array([inner(query, f, config.inner, config.sigma) for f in corpus])


def config_to_json_str(config: KernelConfig) -> str:
    return json.dumps(config.to_json(), sort_keys=True)
