"""HTTP facade over a trained corpus store.

Uploads are held in memory (LRU, capacity 256) and never added to the
training corpus; estimates are pure kernel-row predictions and never trigger
layout computation. Layout jobs for graphs above the synchronous size limit
run on a bounded worker pool and are polled via /api/jobs/{id}.
"""

from __future__ import annotations

import threading
import uuid
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from layoutkernel.corpus import (
    METRIC_NAMES,
    CorpusError,
    CorpusStore,
    compute_layout,
    estimate_metrics,
    similar_in_store,
    upload_features,
)
from layoutkernel.graph import Graph, GraphError, parse_edge_list_detailed
from layoutkernel.kernel import FeatureVector
from layoutkernel.layouts import Layout, LayoutMethod
from layoutkernel.metrics import (
    metric_crosslessness,
    metric_edge_length_variation,
    metric_min_angle,
    metric_shape,
)

SESSION_CAPACITY = 256
SYNC_VERTEX_LIMIT = 20_000
COMPUTABLE_METHODS = (LayoutMethod.FR.value, LayoutMethod.HDE.value, LayoutMethod.CIRCULAR.value)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class SessionGraph:
    graph_id: str
    graph: Graph
    features: FeatureVector


@dataclass
class SessionLayout:
    layout_id: str
    graph_id: str
    method: str
    layout: Layout


@dataclass
class LayoutJob:
    job_id: str
    graph_id: str
    method: str
    status: str = "pending"  # pending | ready | failed
    layout_id: str | None = None
    error: str | None = None


@dataclass
class SessionState:
    graphs: "OrderedDict[str, SessionGraph]" = field(default_factory=OrderedDict)
    layouts: dict = field(default_factory=dict)
    jobs: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _metrics_or_none(g: Graph, layout: Layout) -> dict:
    out = {}
    for name, fn in zip(
        METRIC_NAMES,
        (metric_crosslessness, metric_min_angle, metric_edge_length_variation, metric_shape),
    ):
        try:
            out[name] = fn(g, layout)
        except ValueError:
            out[name] = None
    return out


def _layout_payload(graph: Graph, item: SessionLayout) -> dict:
    return {
        "layout_id": item.layout_id,
        "graph_id": item.graph_id,
        "method": item.method,
        "positions": item.layout.positions.tolist(),
        "edges": graph.edges.tolist(),
    }


def create_app(
    store: CorpusStore,
    worker_count: int = 2,
    sync_limit: int = SYNC_VERTEX_LIMIT,
    ui_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="layoutkernel")
    state = SessionState()
    app.state.sessions = state  # exposed for tests and diagnostics
    executor = ThreadPoolExecutor(max_workers=worker_count)
    corpus_ids = set(store.graph_ids())

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": exc.message}
        )

    def _session_graph(graph_id: str) -> SessionGraph:
        with state.lock:
            session = state.graphs.get(graph_id)
            if session is not None:
                state.graphs.move_to_end(graph_id)
        if session is None:
            raise ApiError(404, "unknown_graph", f"no uploaded graph {graph_id!r}")
        return session

    def _session_layout(layout_id: str) -> SessionLayout:
        with state.lock:
            item = state.layouts.get(layout_id)
        if item is None:
            raise ApiError(404, "unknown_layout", f"no layout {layout_id!r}")
        return item

    def _store_layout(graph_id: str, method: str, layout: Layout) -> SessionLayout:
        item = SessionLayout(uuid.uuid4().hex[:12], graph_id, method, layout)
        with state.lock:
            state.layouts[item.layout_id] = item
        return item

    @app.post("/api/graphs")
    async def upload_graph(request: Request):
        body = await request.body()
        if not body.strip():
            raise ApiError(400, "empty_upload", "request body must be an edge list")
        try:
            parsed = parse_edge_list_detailed(body)
        except GraphError as exc:
            raise ApiError(400, "parse_error", str(exc)) from exc
        g = parsed.graph
        if not g.is_connected():
            raise ApiError(
                400, "disconnected_graph",
                "uploaded graph must be connected; split components before upload",
            )
        try:
            features = upload_features(store, g)
        except (ValueError, CorpusError) as exc:
            raise ApiError(400, "feature_error", str(exc)) from exc
        graph_id = uuid.uuid4().hex[:12]
        g.label = graph_id
        with state.lock:
            state.graphs[graph_id] = SessionGraph(graph_id, g, features)
            while len(state.graphs) > SESSION_CAPACITY:
                state.graphs.popitem(last=False)
        return {
            "graph_id": graph_id,
            "n": g.vertex_count,
            "m": g.edge_count,
            "self_loops_dropped": parsed.self_loops_dropped,
            "duplicate_edges_dropped": parsed.duplicate_edges_dropped,
        }

    @app.get("/api/graphs/{graph_id}")
    def get_graph(graph_id: str):
        session = _session_graph(graph_id)
        return {
            "graph_id": graph_id,
            "n": session.graph.vertex_count,
            "m": session.graph.edge_count,
            "edges": session.graph.edges.tolist(),
        }

    @app.get("/api/methods")
    def get_methods():
        return {"methods": store.layout_methods()}

    @app.get("/api/graphs/{graph_id}/similar")
    def get_similar(graph_id: str, method: str, k: int = 5):
        session = _session_graph(graph_id)
        if k < 1:
            raise ApiError(400, "bad_k", "k must be >= 1")
        results = similar_in_store(store, session.graph, k, features=session.features)
        payload = []
        for r in results:
            entry = {
                "graph_id": r.graph_id,
                "similarity": r.similarity,
                "rank": r.rank,
                "layout_url": f"/api/corpus/graphs/{r.graph_id}/layout?method={method}",
                "metrics": None,
            }
            if store.has_metrics(r.graph_id, method):
                entry["metrics"] = store.load_metrics(r.graph_id, method).to_json()
            payload.append(entry)
        return payload

    @app.get("/api/graphs/{graph_id}/estimates")
    def get_estimates(graph_id: str, method: str):
        session = _session_graph(graph_id)
        missing = [m for m in METRIC_NAMES if not store.has_model(method, m)]
        if missing:
            raise ApiError(
                409, "missing_model",
                f"no trained model for method {method!r}, metrics {missing}",
            )
        return estimate_metrics(store, session.graph, method, features=session.features)

    @app.post("/api/graphs/{graph_id}/layouts")
    def compute_graph_layout(graph_id: str, method: str, seed: int = 0):
        session = _session_graph(graph_id)
        if method not in COMPUTABLE_METHODS:
            raise ApiError(
                400, "unsupported_method",
                f"method {method!r} is not computable here; choose from {COMPUTABLE_METHODS}",
            )
        g = session.graph
        if g.vertex_count <= sync_limit:
            layout = compute_layout(g, method, seed)
            item = _store_layout(graph_id, method, layout)
            return {"layout_id": item.layout_id, "status": "ready"}
        job = LayoutJob(uuid.uuid4().hex[:12], graph_id, method)
        with state.lock:
            state.jobs[job.job_id] = job

        def run():
            try:
                layout = compute_layout(g, method, seed)
                item = _store_layout(graph_id, method, layout)
                with state.lock:
                    job.layout_id = item.layout_id
                    job.status = "ready"
            except Exception as exc:  # job failures surface via polling
                with state.lock:
                    job.status = "failed"
                    job.error = str(exc)

        executor.submit(run)
        return {"job_id": job.job_id, "status": "pending"}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        with state.lock:
            job = state.jobs.get(job_id)
            if job is None:
                raise ApiError(404, "unknown_job", f"no job {job_id!r}")
            return {
                "job_id": job.job_id,
                "status": job.status,
                "layout_id": job.layout_id,
                "error": job.error,
            }

    @app.get("/api/layouts/{layout_id}")
    def get_layout(layout_id: str):
        item = _session_layout(layout_id)
        return _layout_payload(_session_graph(item.graph_id).graph, item)

    @app.get("/api/layouts/{layout_id}/metrics")
    def get_layout_metrics(layout_id: str):
        item = _session_layout(layout_id)
        return _metrics_or_none(_session_graph(item.graph_id).graph, item.layout)

    @app.get("/api/corpus/graphs/{graph_id}/layout")
    def get_corpus_layout(graph_id: str, method: str):
        if graph_id not in corpus_ids:
            raise ApiError(404, "unknown_graph", f"no corpus graph {graph_id!r}")
        if not store.has_layout(graph_id, method):
            raise ApiError(404, "unknown_layout", f"no {method} layout for {graph_id!r}")
        g = store.load_graph(graph_id)
        layout = store.load_layout(graph_id, method)
        return {
            "graph_id": graph_id,
            "method": method,
            "positions": layout.positions.tolist(),
            "edges": g.edges.tolist(),
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def serve(
    store: CorpusStore,
    bind_address: str = "127.0.0.1:8000",
    worker_count: int = 2,
    ui_dir: Path | None = None,
) -> None:
    """Run the API server until interrupted."""
    import uvicorn

    host, _, port = bind_address.rpartition(":")
    app = create_app(store, worker_count=worker_count, ui_dir=ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
