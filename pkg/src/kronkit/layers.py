"""Middle-layer constructions as executable objects: the induced layer
subgraph, random edge splitting, the balanced restriction on U_I, uniform
thinning to the target edge probability, and neighborhood growth profiles.

All agreement thresholds here are rounded to even integers.  Two weight-n/2
vertices that each carry half their ones outside a coordinate window always
agree on an even number of outside positions, so the published real-valued
threshold is realized as twice the rounded half-count; rounding the full
count directly could land on an odd number and admit nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, ParameterError
from .graphkit import GraphStore, induced_subgraph
from .model import KroneckerParams, VertexLabel
from .sampler import SampleSeed, _pair_prob_arrays


@dataclass
class LayerSubgraph:
    """A subgraph living on a sorted subset of cube labels.

    ``vertices`` are parent label ints; ``graph`` is the induced adjacency
    re-indexed to subset positions.  ``parent`` is the materialized host graph
    when one exists, or None when the layer was sampled directly from the
    product law.
    """

    n: int
    vertices: np.ndarray
    graph: GraphStore
    parent: GraphStore | None = None

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.size)

    def index_of(self, label: int) -> int:
        i = int(np.searchsorted(self.vertices, label))
        if i >= self.vertices.size or self.vertices[i] != label:
            raise ParameterError(f"label {label} not in the layer")
        return i

    def edge_labels(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges in parent label space, canonical order."""
        u, v = self.graph.edges()
        return self.vertices[u], self.vertices[v]

    def with_graph(self, graph: GraphStore) -> "LayerSubgraph":
        return LayerSubgraph(self.n, self.vertices, graph, self.parent)


def middle_layer_labels(n: int) -> np.ndarray:
    if n % 2:
        raise ParameterError(f"middle layer requires even dimension, got n={n}")
    labels = np.arange(1 << n, dtype=np.uint64)
    return np.flatnonzero(np.bitwise_count(labels) == n // 2).astype(np.int64)


def middle_layer(g: GraphStore) -> LayerSubgraph:
    """Induced subgraph on all weight-n/2 labels; C(n, n/2) vertices."""
    if g.n is None:
        raise ParameterError("graph has no cube dimension")
    vertices = middle_layer_labels(g.n)
    return LayerSubgraph(g.n, vertices, induced_subgraph(g, vertices), parent=g)


def edge_split(g: GraphStore, m: int, seed: SampleSeed) -> list[GraphStore]:
    """Split edges into m parts, each edge assigned independently and
    uniformly.  The parts partition the edge set exactly; each part marginally
    equals independent thinning with keep probability 1/m."""
    if m < 1:
        raise ParameterError(f"part count must be >= 1, got {m}")
    u, v = g.edges()
    assignment = seed.rng().integers(0, m, size=u.size)
    parts = []
    for i in range(m):
        keep = assignment == i
        pairs = np.stack([u[keep], v[keep]], axis=1)
        parts.append(GraphStore.from_edges(g.vertex_count, pairs, n=g.n))
    return parts


def edge_split_part(g: GraphStore, m: int, seed: SampleSeed, index: int = 0) -> GraphStore:
    """One part of edge_split without building the other m-1 graphs; uses the
    same assignment draw, so part ``index`` matches edge_split's output."""
    if not 0 <= index < m:
        raise ParameterError(f"part index {index} outside [0, {m})")
    u, v = g.edges()
    assignment = seed.rng().integers(0, m, size=u.size)
    keep = assignment == index
    return GraphStore.from_edges(g.vertex_count, np.stack([u[keep], v[keep]], axis=1),
                                 n=g.n)


def differing_coordinates(u: VertexLabel, v: VertexLabel) -> int:
    """Bitmask of the coordinate window I on which the two labels differ."""
    if u.n != v.n:
        raise ParameterError("labels must share a dimension")
    return u.bits ^ v.bits


def u_i_subset(u: VertexLabel, v: VertexLabel) -> np.ndarray:
    """All weight-n/2 labels balanced on the window where u and v differ.

    Requires w(u) = w(v) = n/2; then |I| is automatically even, both u and v
    carry exactly |I|/2 ones inside I, and both belong to the returned set.
    """
    n = u.n
    if u.weight != n // 2 or v.weight != n // 2 or n % 2:
        raise ParameterError("u_i_subset requires two weight-n/2 labels, n even")
    window = np.uint64(differing_coordinates(u, v))
    labels = middle_layer_labels(n).astype(np.uint64)
    half_inside = int(window).bit_count() // 2
    inside = np.bitwise_count(labels & window)
    return labels[inside == half_inside].astype(np.int64)


def balanced_threshold(params: KroneckerParams, n: int, i_size: int) -> tuple[int, int]:
    """(r_star, agreement threshold) for the balanced-edge condition.

    r_star is the rounded per-side count alpha/(alpha+beta) * (n-|I|)/2, ties
    to even; the threshold is 2*r_star agreements outside the window.
    """
    if params.alpha + params.beta <= 0:
        raise ParameterError("alpha + beta must be positive")
    if (n - i_size) % 2:
        raise ParameterError("n - |I| must be even on the middle layer")
    r_star = round(params.alpha / (params.alpha + params.beta) * (n - i_size) / 2)
    return r_star, 2 * r_star


def balanced_edge_filter(params: KroneckerParams, window: int,
                         x: VertexLabel, y: VertexLabel) -> bool:
    """True iff x and y agree on exactly the threshold number of coordinates
    outside the window.  Symmetric in (x, y)."""
    n = x.n
    mask = (1 << n) - 1
    i_size = (window & mask).bit_count()
    outside_disagreements = ((x.bits ^ y.bits) & ~window & mask).bit_count()
    agreements = (n - i_size) - outside_disagreements
    _, threshold = balanced_threshold(params, n, i_size)
    return agreements == threshold


def _agreements_outside(labels_u: np.ndarray, labels_v: np.ndarray,
                        window: int, n: int) -> np.ndarray:
    mask = np.uint64((1 << n) - 1)
    w64 = np.uint64(window)
    diff = (labels_u.astype(np.uint64) ^ labels_v.astype(np.uint64)) & ~w64 & mask
    i_size = int(window).bit_count()
    return (n - i_size) - np.bitwise_count(diff).astype(np.int64)


def filter_balanced_edges(params: KroneckerParams, window: int,
                          sub: LayerSubgraph) -> LayerSubgraph:
    """Keep only the edges satisfying the balanced-agreement condition."""
    lu, lv = sub.edge_labels()
    i_size = int(window).bit_count()
    _, threshold = balanced_threshold(params, sub.n, i_size)
    keep = _agreements_outside(lu, lv, window, sub.n) == threshold
    u, v = sub.graph.edges()
    pairs = np.stack([u[keep], v[keep]], axis=1)
    return sub.with_graph(GraphStore.from_edges(sub.vertex_count, pairs))


def layer_edge_rho(params: KroneckerParams, n: int, i_size: int) -> float:
    """The uniform target probability for admissible layer edges: the
    balanced outside contribution times min(alpha, beta)^|I| times the 1/n^2
    split factor."""
    r_star, threshold = balanced_threshold(params, n, i_size)
    outside = n - i_size
    return (params.alpha ** threshold
            * params.beta ** (outside - threshold)
            * min(params.alpha, params.beta) ** i_size
            / n ** 2)


def uniform_thin(params: KroneckerParams, window: int, sub: LayerSubgraph,
                 seed: SampleSeed) -> LayerSubgraph:
    """Retain each remaining edge with probability rho/rho', equalizing every
    admissible pair's existence probability to exactly rho.

    ``sub`` must already be one 1/n^2 split part restricted to U_I and
    filtered to balanced edges; rho folds the split factor in.  rho' < rho
    cannot happen for admissible edges and raises if observed.
    """
    n = sub.n
    i_size = int(window).bit_count()
    rho = layer_edge_rho(params, n, i_size)
    lu, lv = sub.edge_labels()
    if lu.size == 0:
        return sub.with_graph(GraphStore.from_edges(sub.vertex_count, []))
    rho_prime = _pair_prob_arrays(params, lu, lv, n) / n ** 2
    if np.any(rho_prime < rho * (1 - 1e-12)):
        raise InternalConsistencyError(
            "an admissible edge has existence probability below rho; "
            "the minimality of rho is violated")
    keep_prob = np.minimum(rho / rho_prime, 1.0)
    keep = seed.rng().random(lu.size) < keep_prob
    u, v = sub.graph.edges()
    pairs = np.stack([u[keep], v[keep]], axis=1)
    return sub.with_graph(GraphStore.from_edges(sub.vertex_count, pairs))


def fact1_binomial_law(params: KroneckerParams, n: int, i_size: int) -> tuple[int, float]:
    """(M, rho) for the first-layer size of a thinned-layer vertex: the count
    of admissible partners and their common edge probability.

    M multiplies the outside arrangements C((n-|I|)/2, r_star)^2 by the
    C(|I|, |I|/2) arrangements of a partner inside the window; the inside
    factor is 1 when I is empty.  The (degenerate) case where a vertex would
    count itself is excluded.
    """
    r_star, _ = balanced_threshold(params, n, i_size)
    half_out = (n - i_size) // 2
    m = math.comb(i_size, i_size // 2) * math.comb(half_out, r_star) ** 2
    if r_star == half_out:
        m -= 1
    return m, layer_edge_rho(params, n, i_size)


@dataclass
class GrowthProfile:
    """BFS layer sizes from one source plus the first index at which growth
    falls below the xi^(n*i/2) threshold (None if no index up to kmax does)."""

    source: int
    sizes: tuple[int, ...]
    j_stop: int | None
    xi: float


def growth_profile(source_graph, v: int, xi: float, kmax: int,
                   n: int | None = None) -> GrowthProfile:
    """Layer sizes |N_i(v)| for i = 0..kmax and the stopping index
    J = min{i >= 1 : |N_i(v)| <= xi^(n*i/2)}.

    ``source_graph`` is anything with ``neighbors(v)`` and ``vertex_count``
    (a GraphStore, a LayerSubgraph's graph, or a lazy backend); ``n`` is the
    cube dimension for the threshold and defaults to the source's ``n``.
    """
    if n is None:
        n = getattr(source_graph, "n", None)
    if n is None:
        raise ParameterError("growth threshold needs the cube dimension n")
    if xi <= 1.0:
        raise ParameterError(f"xi must exceed 1, got {xi}")
    seen = np.zeros(source_graph.vertex_count, dtype=bool)
    seen[v] = True
    frontier = np.array([v], dtype=np.int64)
    sizes = [1]
    for _ in range(kmax):
        if frontier.size:
            cand = np.concatenate([np.asarray(source_graph.neighbors(int(x)))
                                   for x in frontier])
            cand = np.unique(cand[~seen[cand]])
            seen[cand] = True
            frontier = cand
        else:
            frontier = np.empty(0, np.int64)
        sizes.append(int(frontier.size))
    j_stop = None
    for i in range(1, kmax + 1):
        if sizes[i] <= xi ** (n * i / 2):
            j_stop = i
            break
    return GrowthProfile(v, tuple(sizes), j_stop, xi)
