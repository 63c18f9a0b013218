"""Canonical edge-list text format shared by the samplers, the analytics, and
the CLI.

Header line:  ``# kron n=<n> alpha=<a> beta=<b> gamma=<g> seed=<s>``
Body lines:   ``<u> <v>`` with u < v as integers, sorted lexicographically.

Layer exports append ``layer=<tag>`` to the header and list edges in parent
label space.  The format is bytewise deterministic for a fixed graph.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .graphkit import GraphStore
from .model import KroneckerParams


def format_header(n: int, params: KroneckerParams | None = None,
                  seed: int | None = None, layer: str | None = None) -> str:
    parts = [f"# kron n={n}"]
    if params is not None:
        parts.append(f"alpha={params.alpha!r} beta={params.beta!r} gamma={params.gamma!r}")
    if seed is not None:
        parts.append(f"seed={seed}")
    if layer is not None:
        parts.append(f"layer={layer}")
    return " ".join(parts)


def write_edge_list(path, graph: GraphStore, params: KroneckerParams | None = None,
                    seed: int | None = None, layer: str | None = None,
                    vertex_ids: np.ndarray | None = None) -> None:
    """Write a graph in the canonical format.

    ``vertex_ids`` translates internal indices to parent labels for layer
    exports; the graph's own ids are used when omitted.
    """
    n = graph.n
    if n is None and vertex_ids is None:
        raise ParameterError("graph has no cube dimension; pass vertex_ids or set n")
    u, v = graph.edges()
    if vertex_ids is not None:
        ids = np.asarray(vertex_ids, dtype=np.int64)
        u, v = ids[u], ids[v]
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        u, v = lo[order], hi[order]
    buf = io.StringIO()
    buf.write(format_header(n if n is not None else -1, params, seed, layer))
    buf.write("\n")
    for a, b in zip(u.tolist(), v.tolist()):
        buf.write(f"{a} {b}\n")
    Path(path).write_text(buf.getvalue())


def read_edge_list(path) -> tuple[GraphStore, dict]:
    """Read a canonical edge list; returns the graph and the header metadata."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# kron"):
        raise ParameterError(f"{path}: missing '# kron' header line")
    meta: dict = {}
    for token in lines[0][len("# kron"):].split():
        if "=" not in token:
            raise ParameterError(f"{path}: malformed header token {token!r}")
        key, value = token.split("=", 1)
        meta[key] = value
    try:
        n = int(meta["n"])
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"{path}: header lacks a valid n=<dim>") from exc
    meta["n"] = n
    for key in ("alpha", "beta", "gamma"):
        if key in meta:
            meta[key] = float(meta[key])
    if "seed" in meta:
        meta["seed"] = int(meta["seed"])
    pairs = []
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            a, b = map(int, line.split())
        except ValueError as exc:
            raise ParameterError(f"{path}:{ln}: malformed edge line {line!r}") from exc
        if a >= b:
            raise ParameterError(f"{path}:{ln}: edges must satisfy u < v")
        pairs.append((a, b))
    graph = GraphStore.from_edges(1 << n, pairs, n=n)
    if graph.edge_count != len(pairs):
        raise ParameterError(f"{path}: duplicate edges in file")
    return graph, meta
