"""Persistent training corpus: graphs, features, layouts, metrics, models.

On-disk layout under one root directory:

    manifest.json             corpus id, seed, kernel config, graph entries
    graphs/<file>.txt         edge lists
    features/<file>.json      raw graphlet counts (inspectable)
    features/<file>.bin       scaled feature vector (GLFV binary)
    layouts/<method>/<file>.txt
    metrics/<method>/<file>.json
    models/<method>-<metric>.json
    reports/<name>.json

The kernel config is corpus-global so all features are comparable; the
median-heuristic sigma is resolved once after feature extraction and frozen
in the manifest. Every derived artifact records the manifest hash it was
built from. Per-item failures are recorded and the pipeline continues.
"""

from __future__ import annotations

import hashlib
import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from layoutkernel.generators import CorpusSpec, generate_corpus_graphs
from layoutkernel.graph import Graph, parse_edge_list_detailed, preprocess, serialize_edge_list
from layoutkernel.kernel import (
    MEDIAN_HEURISTIC,
    FeatureVector,
    InnerKind,
    KernelConfig,
    compute_features,
    kernel_matrix,
    kernel_row,
    sigma_median,
)
from layoutkernel.layouts import (
    Layout,
    LayoutMethod,
    import_layout,
    layout_circular,
    layout_fr,
    layout_hde,
    serialize_layout,
)
from layoutkernel.metrics import MetricsRecord, compute_metrics
from layoutkernel.sampling import GraphletCounts, Sampler, sample_rv, sample_rw
from layoutkernel.similar import CorpusEntry, SimilarityResult, find_similar
from layoutkernel.svr import CvResult, SvrModel, cross_validate, predict_svr, train_svr

METRIC_NAMES = ("m_c", "m_a", "m_l", "m_s")
GENERATED_METHODS = (LayoutMethod.FR, LayoutMethod.HDE, LayoutMethod.CIRCULAR)

FEATURE_MAGIC = b"GLFV"
FEATURE_VERSION = 1


class CorpusError(RuntimeError):
    """Raised for invalid store states or unknown corpus items."""


def write_feature_bin(path: Path, values: np.ndarray) -> None:
    arr = np.asarray(values, dtype="<f8")
    header = FEATURE_MAGIC + struct.pack("<III", FEATURE_VERSION, arr.shape[0], 0)
    path.write_bytes(header + arr.tobytes())


def read_feature_bin(path: Path) -> np.ndarray:
    blob = path.read_bytes()
    if len(blob) < 16 or blob[:4] != FEATURE_MAGIC:
        raise CorpusError(f"{path} is not a feature file")
    version, dim, _ = struct.unpack("<III", blob[4:16])
    if version != FEATURE_VERSION:
        raise CorpusError(f"{path}: unsupported feature version {version}")
    values = np.frombuffer(blob[16:], dtype="<f8")
    if len(values) != dim:
        raise CorpusError(f"{path}: expected {dim} values, found {len(values)}")
    return values.astype(np.float64)


def _slug(graph_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", graph_id)


def _derive_seed(seed: int, index: int) -> int:
    return (seed ^ index) & 0x7FFFFFFF


def _content_seed(seed: int, text: str) -> int:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return (seed ^ int.from_bytes(digest[:4], "little")) & 0x7FFFFFFF


@dataclass
class PrecomputeSummary:
    features_done: int = 0
    layouts_done: int = 0
    metrics_done: int = 0
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "features_done": self.features_done,
            "layouts_done": self.layouts_done,
            "metrics_done": self.metrics_done,
            "failures": self.failures,
        }


@dataclass
class CvReport:
    """Cross-validation results per (layout method, metric)."""

    results: dict[tuple[str, str], CvResult]
    fold_count: int
    repeat_count: int
    seed: int

    def to_json(self) -> dict:
        return {
            "fold_count": self.fold_count,
            "repeat_count": self.repeat_count,
            "seed": self.seed,
            "cells": [
                {"method": method, "metric": metric, **result.to_json()}
                for (method, metric), result in sorted(self.results.items())
            ],
        }

    def render_table(self) -> str:
        methods = sorted({m for m, _ in self.results})
        width = 16
        lines = []
        header = "metric".ljust(8) + "".join(m.rjust(width) for m in methods)
        lines.append(header)
        for metric in METRIC_NAMES:
            cells = []
            for method in methods:
                res = self.results.get((method, metric))
                if res is None:
                    cells.append("-".rjust(width))
                    continue
                r2 = f"{res.mean_r2:.4f}" if res.mean_r2 is not None else "n/a"
                cells.append(f"{res.mean_rmse:.4f}/{r2}".rjust(width))
            lines.append(metric.ljust(8) + "".join(cells))
        return "\n".join(lines) + "\n"


class CorpusStore:
    """Directory-backed corpus with a JSON manifest."""

    def __init__(self, root: Path, manifest: dict):
        self.root = Path(root)
        self.manifest = manifest

    @classmethod
    def create(
        cls,
        root: Path,
        kernel_config: KernelConfig,
        corpus_id: str = "corpus",
        seed: int = 0,
    ) -> "CorpusStore":
        root = Path(root)
        if (root / "manifest.json").exists():
            raise CorpusError(f"store already exists at {root}")
        for sub in ("graphs", "features", "layouts", "metrics", "models", "reports"):
            (root / sub).mkdir(parents=True, exist_ok=True)
        manifest = {
            "corpus_id": corpus_id,
            "seed": seed,
            "kernel_config": kernel_config.to_json(),
            "sigma": None,
            "graphs": [],
            "ingest_errors": [],
        }
        store = cls(root, manifest)
        store.save_manifest()
        return store

    @classmethod
    def open(cls, root: Path) -> "CorpusStore":
        root = Path(root)
        path = root / "manifest.json"
        if not path.exists():
            raise CorpusError(f"no manifest at {path}")
        return cls(root, json.loads(path.read_text()))

    def save_manifest(self) -> None:
        (self.root / "manifest.json").write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"
        )

    @property
    def kernel_config(self) -> KernelConfig:
        return KernelConfig.from_json(self.manifest["kernel_config"])

    @property
    def sigma(self) -> float | None:
        return self.manifest["sigma"]

    def resolved_config(self) -> KernelConfig:
        config = self.kernel_config
        if config.sigma == MEDIAN_HEURISTIC and config.inner != InnerKind.COS:
            if self.sigma is None:
                raise CorpusError("sigma not frozen yet; run feature extraction first")
            return KernelConfig.from_json({**config.to_json(), "sigma": self.sigma})
        return config

    def manifest_hash(self) -> str:
        identity = {
            "corpus_id": self.manifest["corpus_id"],
            "seed": self.manifest["seed"],
            "kernel_config": self.manifest["kernel_config"],
            "graphs": self.manifest["graphs"],
        }
        blob = json.dumps(identity, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    # ---- graphs ----

    def graph_entries(self) -> list[dict]:
        return self.manifest["graphs"]

    def graph_ids(self) -> list[str]:
        return [e["id"] for e in self.manifest["graphs"]]

    def _entry(self, graph_id: str) -> dict:
        for e in self.manifest["graphs"]:
            if e["id"] == graph_id:
                return e
        raise CorpusError(f"unknown graph id {graph_id!r}")

    def add_graph(self, graph_id: str, g: Graph) -> None:
        if any(e["id"] == graph_id for e in self.manifest["graphs"]):
            raise CorpusError(f"duplicate graph id {graph_id!r}")
        slug = _slug(graph_id)
        existing = {e["file"] for e in self.manifest["graphs"]}
        candidate = f"graphs/{slug}.txt"
        bump = 0
        while candidate in existing:
            bump += 1
            candidate = f"graphs/{slug}.{bump}.txt"
        (self.root / candidate).write_text(serialize_edge_list(g))
        self.manifest["graphs"].append(
            {"id": graph_id, "n": g.vertex_count, "m": g.edge_count, "file": candidate}
        )

    def load_graph(self, graph_id: str) -> Graph:
        entry = self._entry(graph_id)
        g = parse_edge_list_detailed((self.root / entry["file"]).read_text()).graph
        g.label = graph_id
        return g

    # ---- features ----

    def _file_stem(self, graph_id: str) -> str:
        return Path(self._entry(graph_id)["file"]).stem

    def save_counts(self, graph_id: str, counts: GraphletCounts, features: FeatureVector) -> None:
        stem = self._file_stem(graph_id)
        record = {
            "graph_id": graph_id,
            "sampler": counts.sampler.value,
            "sizes": sorted(counts.sizes),
            "sample_count": counts.sample_count,
            "weights": counts.weights.tolist(),
            "manifest_hash": self.manifest_hash(),
        }
        (self.root / "features" / f"{stem}.json").write_text(
            json.dumps(record, sort_keys=True) + "\n"
        )
        write_feature_bin(self.root / "features" / f"{stem}.bin", features.values)

    def load_features(self, graph_id: str) -> FeatureVector:
        path = self.root / "features" / f"{self._file_stem(graph_id)}.bin"
        if not path.exists():
            raise CorpusError(f"no features stored for {graph_id!r}")
        return FeatureVector(read_feature_bin(path))

    def has_features(self, graph_id: str) -> bool:
        return (self.root / "features" / f"{self._file_stem(graph_id)}.bin").exists()

    def all_features(self) -> dict[str, FeatureVector]:
        return {gid: self.load_features(gid) for gid in self.graph_ids() if self.has_features(gid)}

    # ---- layouts and metrics ----

    def layout_methods(self) -> list[str]:
        base = self.root / "layouts"
        return sorted(p.name for p in base.iterdir() if p.is_dir()) if base.exists() else []

    def save_layout(self, graph_id: str, method: str, layout: Layout) -> None:
        directory = self.root / "layouts" / method
        directory.mkdir(parents=True, exist_ok=True)
        text = f"# manifest {self.manifest_hash()}\n" + serialize_layout(layout)
        (directory / f"{self._file_stem(graph_id)}.txt").write_text(text)

    def load_layout(self, graph_id: str, method: str) -> Layout:
        path = self.root / "layouts" / method / f"{self._file_stem(graph_id)}.txt"
        if not path.exists():
            raise CorpusError(f"no {method} layout stored for {graph_id!r}")
        layout = import_layout(self.load_graph(graph_id), path.read_text())
        try:
            layout.method = LayoutMethod(method)
        except ValueError:
            layout.method = LayoutMethod.IMPORTED
        layout.graph_id = graph_id
        return layout

    def has_layout(self, graph_id: str, method: str) -> bool:
        return (self.root / "layouts" / method / f"{self._file_stem(graph_id)}.txt").exists()

    def save_metrics(self, graph_id: str, method: str, record: MetricsRecord) -> None:
        directory = self.root / "metrics" / method
        directory.mkdir(parents=True, exist_ok=True)
        payload = {
            "graph_id": graph_id,
            "method": method,
            **record.to_json(),
            "manifest_hash": self.manifest_hash(),
        }
        (directory / f"{self._file_stem(graph_id)}.json").write_text(
            json.dumps(payload, sort_keys=True) + "\n"
        )

    def load_metrics(self, graph_id: str, method: str) -> MetricsRecord:
        path = self.root / "metrics" / method / f"{self._file_stem(graph_id)}.json"
        if not path.exists():
            raise CorpusError(f"no {method} metrics stored for {graph_id!r}")
        return MetricsRecord.from_json(json.loads(path.read_text()))

    def has_metrics(self, graph_id: str, method: str) -> bool:
        return (self.root / "metrics" / method / f"{self._file_stem(graph_id)}.json").exists()

    # ---- models ----

    def model_path(self, method: str, metric: str) -> Path:
        return self.root / "models" / f"{method}-{metric}.json"

    def save_model(self, method: str, metric: str, model: SvrModel, graph_ids: list[str]) -> None:
        payload = {
            "target": [method, metric],
            **model.to_json(),
            "graph_ids": graph_ids,
            "training_corpus_hash": self.manifest_hash(),
        }
        self.model_path(method, metric).write_text(json.dumps(payload, sort_keys=True) + "\n")

    def load_model(self, method: str, metric: str) -> tuple[SvrModel, list[str]]:
        path = self.model_path(method, metric)
        if not path.exists():
            raise CorpusError(f"no trained model for ({method}, {metric})")
        data = json.loads(path.read_text())
        return SvrModel.from_json(data), list(data["graph_ids"])

    def has_model(self, method: str, metric: str) -> bool:
        return self.model_path(method, metric).exists()

    def model_methods(self) -> list[str]:
        methods = set()
        for path in (self.root / "models").glob("*.json"):
            data = json.loads(path.read_text())
            methods.add(data["target"][0])
        return sorted(methods)


# ---- pipeline operations ----


def generate_synthetic_corpus(
    spec: CorpusSpec,
    seed: int,
    root: Path,
    kernel_config: KernelConfig | None = None,
    corpus_id: str = "synthetic",
) -> CorpusStore:
    """Create a store populated with deterministic synthetic graphs."""
    store = CorpusStore.create(root, kernel_config or KernelConfig(), corpus_id, seed)
    for graph_id, g in generate_corpus_graphs(spec, seed):
        store.add_graph(graph_id, g)
    store.save_manifest()
    return store


def ingest(directory: Path, min_vertices: int, store: CorpusStore) -> CorpusStore:
    """Parse every edge-list file in a directory into corpus components.

    Components with fewer than ``min_vertices`` vertices are dropped and
    counted; unreadable files are recorded as errors and skipped.
    """
    directory = Path(directory)
    filtered = 0
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        try:
            parsed = parse_edge_list_detailed(path.read_text())
            components = preprocess(parsed.graph, min_vertices=1)
            for idx, component in enumerate(components):
                if component.vertex_count < min_vertices:
                    filtered += 1
                    continue
                store.add_graph(f"{path.name}#{idx}", component)
        except (OSError, ValueError) as exc:
            store.manifest["ingest_errors"].append({"file": path.name, "error": str(exc)})
    store.manifest.setdefault("filtered_components", 0)
    store.manifest["filtered_components"] += filtered
    store.save_manifest()
    return store


def sample_counts(g: Graph, config: KernelConfig, seed: int) -> GraphletCounts:
    if config.sampler == Sampler.RW:
        return sample_rw(g, {3, 4, 5}, config.sample_count, seed)
    return sample_rv(g, {3, 4, 5}, config.sample_count, seed)


def compute_layout(g: Graph, method: str, seed: int, fr_iterations: int = 500) -> Layout:
    if method == LayoutMethod.FR.value:
        return layout_fr(g, iterations=fr_iterations, seed=seed)
    if method == LayoutMethod.HDE.value:
        return layout_hde(g, seed=seed)
    if method == LayoutMethod.CIRCULAR.value:
        return layout_circular(g)
    raise CorpusError(f"unknown layout method {method!r} (imports go through ingest)")


def compute_features_all(
    store: CorpusStore,
    kernel_config: KernelConfig | None = None,
    seed: int | None = None,
) -> PrecomputeSummary:
    """Sample counts and persist features for every graph; freeze sigma.

    Per-graph seeds are derived as seed XOR graph index. The median-heuristic
    sigma is resolved over all stored features and frozen into the manifest.
    """
    if kernel_config is not None:
        store.manifest["kernel_config"] = kernel_config.to_json()
    if seed is not None:
        store.manifest["seed"] = seed
    base_seed = store.manifest["seed"]
    config = store.kernel_config
    summary = PrecomputeSummary()
    features: list[FeatureVector] = []
    for index, graph_id in enumerate(store.graph_ids()):
        g = store.load_graph(graph_id)
        try:
            counts = sample_counts(g, config, _derive_seed(base_seed, index))
            vector = compute_features(counts, config)
            store.save_counts(graph_id, counts, vector)
            features.append(vector)
            summary.features_done += 1
        except (ValueError, CorpusError) as exc:
            summary.failures.append({"stage": "features", "graph_id": graph_id, "error": str(exc)})
    if config.sigma == MEDIAN_HEURISTIC and config.inner != InnerKind.COS and len(features) >= 2:
        store.manifest["sigma"] = sigma_median(features, config.inner)
    store.save_manifest()
    return summary


def compute_layouts_all(
    store: CorpusStore,
    layout_methods: list[str],
    seed: int | None = None,
    fr_iterations: int = 500,
) -> PrecomputeSummary:
    """Compute and persist layouts per (graph, method)."""
    base_seed = store.manifest["seed"] if seed is None else seed
    summary = PrecomputeSummary()
    generated = {m.value for m in GENERATED_METHODS}
    for method in layout_methods:
        if method not in generated:
            summary.failures.append(
                {"stage": "layouts", "method": method, "error": f"unknown method {method!r}"}
            )
    layout_methods = [m for m in layout_methods if m in generated]
    for index, graph_id in enumerate(store.graph_ids()):
        g = store.load_graph(graph_id)
        graph_seed = _derive_seed(base_seed, index)
        for method in layout_methods:
            try:
                store.save_layout(graph_id, method, compute_layout(g, method, graph_seed, fr_iterations))
                summary.layouts_done += 1
            except ValueError as exc:
                summary.failures.append(
                    {"stage": "layouts", "graph_id": graph_id, "method": method, "error": str(exc)}
                )
    return summary


def compute_metrics_all(store: CorpusStore, layout_methods: list[str]) -> PrecomputeSummary:
    """Compute and persist metric records for stored layouts."""
    summary = PrecomputeSummary()
    for graph_id in store.graph_ids():
        g = store.load_graph(graph_id)
        for method in layout_methods:
            if not store.has_layout(graph_id, method):
                continue
            try:
                layout = store.load_layout(graph_id, method)
                store.save_metrics(graph_id, method, compute_metrics(g, layout))
                summary.metrics_done += 1
            except ValueError as exc:
                summary.failures.append(
                    {"stage": "metrics", "graph_id": graph_id, "method": method, "error": str(exc)}
                )
    return summary


def precompute_all(
    store: CorpusStore,
    layout_methods: list[str],
    kernel_config: KernelConfig | None = None,
    seed: int | None = None,
    fr_iterations: int = 500,
) -> PrecomputeSummary:
    """Features for every graph, then layouts and metrics per method.

    Per-item failures are recorded in the summary and the pipeline continues.
    """
    summary = compute_features_all(store, kernel_config, seed)
    lay = compute_layouts_all(store, layout_methods, fr_iterations=fr_iterations)
    met = compute_metrics_all(store, [m for m in layout_methods])
    summary.layouts_done = lay.layouts_done
    summary.metrics_done = met.metrics_done
    summary.failures.extend(lay.failures)
    summary.failures.extend(met.failures)
    return summary


def _training_rows(store: CorpusStore, method: str) -> tuple[list[str], list[FeatureVector]]:
    ids = [
        gid for gid in store.graph_ids()
        if store.has_features(gid) and store.has_metrics(gid, method)
    ]
    return ids, [store.load_features(gid) for gid in ids]


def train_models(store: CorpusStore, C: float = 1.0, epsilon: float = 0.1) -> dict:
    """One model per (layout method, metric); skips pairs lacking data."""
    config = store.resolved_config()
    trained, skipped = [], []
    for method in store.layout_methods():
        ids, features = _training_rows(store, method)
        if len(ids) < 2:
            for metric in METRIC_NAMES:
                skipped.append(
                    {"method": method, "metric": metric,
                     "reason": f"only {len(ids)} rows with metrics"}
                )
            continue
        km = kernel_matrix(features, config)
        records = [store.load_metrics(gid, method) for gid in ids]
        for metric in METRIC_NAMES:
            targets = np.array([getattr(r, metric) for r in records])
            model = train_svr(km, targets, C=C, epsilon=epsilon)
            model.target = (method, metric)
            store.save_model(method, metric, model, ids)
            trained.append({"method": method, "metric": metric, "rows": len(ids)})
    return {"trained": trained, "skipped": skipped}


def evaluate(
    store: CorpusStore,
    folds: int = 10,
    repeats: int = 10,
    seed: int = 0,
    C: float = 1.0,
    epsilon: float = 0.1,
) -> CvReport:
    """Repeated k-fold cross-validation per (method, metric); persists JSON."""
    config = store.resolved_config()
    results: dict[tuple[str, str], CvResult] = {}
    for method in store.layout_methods():
        ids, features = _training_rows(store, method)
        if len(ids) < folds:
            continue
        km = kernel_matrix(features, config)
        records = [store.load_metrics(gid, method) for gid in ids]
        for metric in METRIC_NAMES:
            targets = np.array([getattr(r, metric) for r in records])
            results[(method, metric)] = cross_validate(
                km, targets, folds=folds, repeats=repeats, C=C, epsilon=epsilon, seed=seed,
            )
    report = CvReport(results, folds, repeats, seed)
    payload = {**report.to_json(), "manifest_hash": store.manifest_hash()}
    name = f"cv-f{folds}-r{repeats}-s{seed}.json"
    (store.root / "reports" / name).write_text(json.dumps(payload, sort_keys=True) + "\n")
    return report


def upload_features(store: CorpusStore, g: Graph) -> FeatureVector:
    """Features for a non-corpus graph, deterministic in its content."""
    config = store.kernel_config
    seed = _content_seed(store.manifest["seed"], serialize_edge_list(g))
    return compute_features(sample_counts(g, config, seed), config)


def corpus_entries(store: CorpusStore) -> list[CorpusEntry]:
    entries = []
    for e in store.graph_entries():
        if store.has_features(e["id"]):
            entries.append(CorpusEntry(e["id"], store.load_features(e["id"]), e["n"]))
    return entries


def similar_in_store(
    store: CorpusStore, g: Graph, k: int, features: FeatureVector | None = None
) -> list[SimilarityResult]:
    features = features if features is not None else upload_features(store, g)
    return find_similar(
        features, g.vertex_count, corpus_entries(store), k, store.resolved_config()
    )


def estimate_metrics(
    store: CorpusStore, g: Graph, method: str, features: FeatureVector | None = None
) -> dict[str, float]:
    """Predicted aesthetic metrics for a graph without computing its layout."""
    config = store.resolved_config()
    features = features if features is not None else upload_features(store, g)
    estimates = {}
    for metric in METRIC_NAMES:
        model, graph_ids = store.load_model(method, metric)
        corpus_features = [store.load_features(gid) for gid in graph_ids]
        row = kernel_row(features, corpus_features, config)
        estimates[metric] = min(1.0, max(0.0, predict_svr(model, row)))
    return estimates
