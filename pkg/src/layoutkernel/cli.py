"""Command line entry point for the corpus pipeline and query operations.

Machine-readable JSON goes to stdout; human-readable errors and progress go
to stderr. Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from layoutkernel.catalog import catalog_json
from layoutkernel.corpus import (
    CorpusStore,
    compute_features_all,
    compute_layouts_all,
    compute_metrics_all,
    estimate_metrics,
    evaluate,
    generate_synthetic_corpus,
    ingest,
    similar_in_store,
    train_models,
)
from layoutkernel.generators import CorpusSpec
from layoutkernel.graph import parse_edge_list
from layoutkernel.kernel import parse_kernel_name
from layoutkernel.layouts import import_layout
from layoutkernel.metrics import compute_metrics


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _open_store(args) -> CorpusStore:
    return CorpusStore.open(Path(args.store))


def _kernel_config(args):
    config = parse_kernel_name(args.kernel)
    if args.samples is not None:
        config = dataclasses.replace(config, sample_count=args.samples)
    return config


def _add_shared(parser: argparse.ArgumentParser, store_required: bool = True) -> None:
    parser.add_argument("--store", required=store_required, help="corpus store directory")
    parser.add_argument("--seed", type=int, default=None, help="pipeline seed")
    parser.add_argument("--kernel", default="rw-log-laplacian",
                        help="kernel name, sampler-scaling-inner")
    parser.add_argument("--samples", type=int, default=None, help="graphlet samples per graph")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="layoutkernel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="create a synthetic corpus store")
    _add_shared(p)
    p.add_argument("--spec", required=True,
                   help="family:count:nmin-nmax[:p=..][:extra=..], comma separated")
    p.add_argument("--corpus-id", default="synthetic")

    p = sub.add_parser("ingest", help="add edge-list files to a store")
    _add_shared(p)
    p.add_argument("--dir", required=True, help="directory of edge-list files")
    p.add_argument("--min-vertices", type=int, default=1)
    p.add_argument("--corpus-id", default="ingested")

    p = sub.add_parser("features", help="sample graphlets and persist features")
    _add_shared(p)

    p = sub.add_parser("layouts", help="compute layouts for corpus graphs")
    _add_shared(p)
    p.add_argument("--methods", default="fr,hde,circular", help="comma-separated method tags")
    p.add_argument("--fr-iterations", type=int, default=500)

    p = sub.add_parser("metrics", help="aesthetic metrics for stored or given layouts")
    p.add_argument("--store", help="corpus store directory (store mode)")
    p.add_argument("--methods", default="fr,hde,circular")
    p.add_argument("--graph", help="edge-list file (single-pair mode)")
    p.add_argument("--layout", help="layout file (single-pair mode)")

    p = sub.add_parser("train", help="train one model per (method, metric)")
    _add_shared(p)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)

    p = sub.add_parser("evaluate", help="repeated k-fold cross-validation report")
    _add_shared(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)

    p = sub.add_parser("similar", help="retrieve most similar corpus graphs")
    _add_shared(p)
    p.add_argument("--graph", required=True, help="query edge-list file")
    p.add_argument("--k", type=int, default=5)

    p = sub.add_parser("estimate", help="estimate aesthetic metrics for a graph")
    _add_shared(p)
    p.add_argument("--graph", required=True, help="query edge-list file")
    p.add_argument("--method", required=True, help="layout method tag")

    p = sub.add_parser("serve", help="run the HTTP API over a trained store")
    _add_shared(p)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.add_argument("--threads", type=int, default=2, help="layout job worker threads")
    p.add_argument("--ui", default=None, help="directory of built web UI files")

    p = sub.add_parser("catalog", help="graphlet catalog utilities")
    catalog_sub = p.add_subparsers(dest="catalog_command", required=True)
    catalog_sub.add_parser("dump", help="emit the 49 classes as JSON")

    return parser


def _cmd_generate(args) -> None:
    spec = CorpusSpec.parse(args.spec)
    store = generate_synthetic_corpus(
        spec, seed=args.seed or 0, root=Path(args.store),
        kernel_config=_kernel_config(args), corpus_id=args.corpus_id,
    )
    _emit({"store": str(store.root), "graphs": len(store.graph_ids())})


def _cmd_ingest(args) -> None:
    root = Path(args.store)
    if (root / "manifest.json").exists():
        store = CorpusStore.open(root)
    else:
        store = CorpusStore.create(root, _kernel_config(args), args.corpus_id, args.seed or 0)
    before = len(store.graph_ids())
    store = ingest(Path(args.dir), args.min_vertices, store)
    _emit({
        "ingested": len(store.graph_ids()) - before,
        "filtered_components": store.manifest.get("filtered_components", 0),
        "errors": store.manifest["ingest_errors"],
    })


def _cmd_features(args) -> None:
    store = _open_store(args)
    config = _kernel_config(args) if args.kernel else None
    summary = compute_features_all(store, kernel_config=config, seed=args.seed)
    _emit(summary.to_json())


def _cmd_layouts(args) -> None:
    store = _open_store(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    summary = compute_layouts_all(store, methods, seed=args.seed,
                                  fr_iterations=args.fr_iterations)
    _emit(summary.to_json())


def _cmd_metrics(args) -> None:
    if args.graph and args.layout:
        g = parse_edge_list(Path(args.graph).read_text())
        layout = import_layout(g, Path(args.layout).read_text())
        _emit(compute_metrics(g, layout).to_json())
        return
    if not args.store:
        raise SystemExit2("metrics needs either --store or both --graph and --layout")
    store = CorpusStore.open(Path(args.store))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    _emit(compute_metrics_all(store, methods).to_json())


def _cmd_train(args) -> None:
    store = _open_store(args)
    _emit(train_models(store, C=args.C, epsilon=args.epsilon))


def _cmd_evaluate(args) -> None:
    store = _open_store(args)
    report = evaluate(store, folds=args.folds, repeats=args.repeats,
                      seed=args.seed or 0, C=args.C, epsilon=args.epsilon)
    print(report.render_table(), file=sys.stderr)
    _emit(report.to_json())


def _cmd_similar(args) -> None:
    store = _open_store(args)
    g = parse_edge_list(Path(args.graph).read_text())
    results = similar_in_store(store, g, args.k)
    _emit([
        {"graph_id": r.graph_id, "similarity": r.similarity, "rank": r.rank}
        for r in results
    ])


def _cmd_estimate(args) -> None:
    store = _open_store(args)
    g = parse_edge_list(Path(args.graph).read_text())
    _emit(estimate_metrics(store, g, args.method))


def _cmd_serve(args) -> None:
    from layoutkernel.service import serve

    store = _open_store(args)
    ui_dir = Path(args.ui) if args.ui else None
    serve(store, bind_address=args.bind, worker_count=args.threads, ui_dir=ui_dir)


def _cmd_catalog(args) -> None:
    if args.catalog_command == "dump":
        _emit(catalog_json())


class SystemExit2(RuntimeError):
    """Runtime failure mapped to exit code 2."""


_HANDLERS = {
    "generate": _cmd_generate,
    "ingest": _cmd_ingest,
    "features": _cmd_features,
    "layouts": _cmd_layouts,
    "metrics": _cmd_metrics,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "similar": _cmd_similar,
    "estimate": _cmd_estimate,
    "serve": _cmd_serve,
    "catalog": _cmd_catalog,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        _HANDLERS[args.command](args)
    except (SystemExit2, Exception) as exc:  # noqa: BLE001 - single CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
