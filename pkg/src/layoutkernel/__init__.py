"""Graphlet-kernel similarity search and layout aesthetic-metric estimation.

The package turns a graph into a graphlet-frequency feature vector, compares
graphs with kernel functions over those vectors, and uses the similarities to
(a) retrieve stored layouts of topologically similar graphs and (b) estimate
layout aesthetic metrics with kernelized support vector regression, without
computing the layout itself.
"""

from layoutkernel.graph import Graph, SmallGraph, parse_edge_list
from layoutkernel.catalog import GraphletCatalog, build_catalog

__all__ = [
    "Graph",
    "SmallGraph",
    "parse_edge_list",
    "GraphletCatalog",
    "build_catalog",
]
