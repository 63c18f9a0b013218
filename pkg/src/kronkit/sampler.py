"""Exact Kronecker graph samplers.

Three backends realize the same product measure with different couplings:

* grouped: the 2^n candidate neighbors of a vertex split into signature
  classes that share one edge probability; a single Binomial draw per class
  followed by uniform selection of that many distinct members is equivalent
  to an independent Bernoulli per candidate, so a whole neighborhood costs
  O(n^2) draws plus output size.
* naive: one uniform per pair, the brute-force reference the grouped backend
  is tested against.
* lazy: the indicator of edge {u, v} is a counter-based hash of
  (seed, min(u, v), max(u, v)), so neighborhoods can be queried on demand,
  agree across queries, and never require materializing the graph.

Backends are compared distributionally only; realizations differ.
All samplers are pure functions of (params, seed) and safe to run in
parallel across trials with per-trial streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, ResourceLimitError
from .graphkit import UNREACHABLE, GraphStore
from .model import MAX_DIMENSION, KroneckerParams, VertexLabel

#: Default cap on full-graph materialization (2^n vertices).
DEFAULT_GRAPH_CAP = 22

_MASK64 = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_HASH_INIT = 0x6A09E667F3BCC909


@dataclass(frozen=True)
class SampleSeed:
    """Root entropy plus a trial stream; the same (seed, stream) reproduces
    byte-identical output across runs and platforms."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise ParameterError("seed and stream must be non-negative")

    def rng(self, *subkey: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(self.stream, *subkey))
        return np.random.default_rng(ss)

    def child(self, *subkey: int) -> "SampleSeed":
        """A derived seed for a sub-experiment, folded into the stream key."""
        mixed = self.stream
        for k in subkey:
            mixed = _mix64((mixed + k + _GOLD) & _MASK64)
        return SampleSeed(self.seed, mixed)


@dataclass(frozen=True)
class SignatureClass:
    """Candidate neighbors of a vertex v sharing a fixed overlap signature.

    ``a`` counts ones placed on v's one-positions, ``b`` ones placed on v's
    zero-positions; all ``size = C(w, a) * C(n-w, b)`` members share the edge
    probability ``alpha^a * beta^((w-a)+b) * gamma^((n-w)-b)``.
    """

    a: int
    b: int
    size: int
    prob: float


def signature_classes(params: KroneckerParams, v: VertexLabel) -> list[SignatureClass]:
    """All (w+1)(n-w+1) signature classes of v, including the self class
    (a=w, b=0).  Sizes sum to 2^n; size*prob sums to
    (alpha+beta)^w (beta+gamma)^(n-w)."""
    w, n = v.weight, v.n
    out = []
    for a in range(w + 1):
        for b in range(n - w + 1):
            size = math.comb(w, a) * math.comb(n - w, b)
            prob = (params.alpha ** a
                    * params.beta ** ((w - a) + b)
                    * params.gamma ** ((n - w) - b))
            out.append(SignatureClass(a, b, size, prob))
    return out


@lru_cache(maxsize=512)
def _class_table(key: tuple, n: int, w: int):
    """Vectorized class arrays for one (params, n, w).  Class sizes fit int64
    for every n <= 63, so Binomial draws can always go through numpy's exact
    generator."""
    alpha, beta, gamma = key
    a = np.repeat(np.arange(w + 1), n - w + 1)
    b = np.tile(np.arange(n - w + 1), w + 1)
    size = np.array([math.comb(w, x) * math.comb(n - w, y)
                     for x, y in zip(a, b)], dtype=np.int64)
    prob = (np.power(alpha, a, dtype=np.float64)
            * np.power(beta, (w - a) + b, dtype=np.float64)
            * np.power(gamma, (n - w) - b, dtype=np.float64))
    self_index = int(np.flatnonzero((a == w) & (b == 0))[0])
    return a, b, size, prob, self_index


def _unrank_subset_bits(rank: int, k: int, positions: list[int]) -> int:
    """Bits of the rank-th k-subset of ``positions`` in lexicographic order."""
    bits = 0
    m = len(positions)
    i = 0
    while k > 0:
        c = math.comb(m - 1 - i, k - 1)
        if rank < c:
            bits |= 1 << positions[i]
            k -= 1
        else:
            rank -= c
        i += 1
    return bits


def _distinct_ranks(rng: np.random.Generator, size: int, k: int):
    """k distinct uniform ranks in [0, size).  Small classes go through a
    without-replacement choice; huge ones use rejection on collisions, which
    is cheap because k is then a vanishing fraction of size."""
    if k <= 0:
        return []
    if k >= size:
        return list(range(size))
    if size <= (1 << 20):
        return rng.choice(size, size=k, replace=False).tolist()
    if k > (1 << 26):
        raise ResourceLimitError(f"neighborhood draw of {k} members exceeds cap")
    seen: set[int] = set()
    while len(seen) < k:
        draw = rng.integers(0, size, size=k - len(seen), dtype=np.int64)
        seen.update(int(x) for x in draw)
    return sorted(seen)


def _bit_positions(bits: int, n: int) -> tuple[list[int], list[int]]:
    ones = [i for i in range(n) if (bits >> i) & 1]
    zeros = [i for i in range(n) if not (bits >> i) & 1]
    return ones, zeros


def _sample_neighbor_bits(params: KroneckerParams, vbits: int, n: int,
                          rng: np.random.Generator) -> list[int]:
    """One exact draw of the whole neighborhood of v, as raw label ints."""
    w = vbits.bit_count()
    a_arr, b_arr, size, prob, self_index = _class_table(params.as_tuple(), n, w)
    counts = rng.binomial(size, prob)
    counts[self_index] = 0
    if not counts.any():
        return []
    ones_pos, zeros_pos = _bit_positions(vbits, n)
    out = []
    for idx in np.flatnonzero(counts):
        a, b = int(a_arr[idx]), int(b_arr[idx])
        nb = math.comb(n - w, b)
        for rank in _distinct_ranks(rng, int(size[idx]), int(counts[idx])):
            ra, rb = divmod(int(rank), nb)
            out.append(_unrank_subset_bits(ra, a, ones_pos)
                       | _unrank_subset_bits(rb, b, zeros_pos))
    return out


def sample_neighbors(params: KroneckerParams, v: VertexLabel,
                     seed: SampleSeed) -> set[VertexLabel]:
    """Neighborhood of v under the grouped backend: each u != v included
    independently with probability edge_probability(params, u, v)."""
    bits = _sample_neighbor_bits(params, v.bits, v.n, seed.rng())
    return {VertexLabel(b, v.n) for b in bits}


def _weights_of_all_labels(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def sample_edge_arrays(params: KroneckerParams, n: int,
                       seed: SampleSeed) -> np.ndarray:
    """The grouped backend's edge draw as a raw (m, 2) pair array with u < v.

    Vertices are processed in label order grouped by weight; each vertex draws
    its full class sample and retains neighbors strictly greater than itself,
    which decides every unordered pair exactly once because class sampling is
    member-wise independent.
    """
    rng = seed.rng()
    wts = _weights_of_all_labels(n)
    us: list[int] = []
    vs: list[int] = []
    chunk_size = 2048
    for w in range(n + 1):
        verts = np.flatnonzero(wts == w)
        a_arr, b_arr, size, prob, self_index = _class_table(params.as_tuple(), n, w)
        ncls = size.size
        divisor = np.array([math.comb(n - w, int(b)) for b in b_arr], dtype=np.int64)
        for start in range(0, verts.size, chunk_size):
            block = verts[start:start + chunk_size]
            counts = rng.binomial(size[None, :], prob[None, :],
                                  size=(block.size, ncls))
            counts[:, self_index] = 0
            rows, cols = np.nonzero(counts)
            if rows.size == 0:
                continue
            # count-1 draws (the bulk) get their ranks in one vectorized call
            kvals = counts[rows, cols]
            ranks_single = np.where(
                kvals == 1,
                rng.integers(0, size[cols], dtype=np.int64), 0)
            cur_row = -1
            ones_pos: list[int] = []
            zeros_pos: list[int] = []
            vbits = 0
            for i, (r, c) in enumerate(zip(rows.tolist(), cols.tolist())):
                if r != cur_row:
                    cur_row = r
                    vbits = int(block[r])
                    ones_pos, zeros_pos = _bit_positions(vbits, n)
                a, b = int(a_arr[c]), int(b_arr[c])
                k = int(kvals[i])
                if k == 1:
                    ranks = (int(ranks_single[i]),)
                else:
                    ranks = _distinct_ranks(rng, int(size[c]), k)
                nb = int(divisor[c])
                for rank in ranks:
                    ra, rb = divmod(int(rank), nb)
                    ubits = (_unrank_subset_bits(ra, a, ones_pos)
                             | _unrank_subset_bits(rb, b, zeros_pos))
                    if ubits > vbits:
                        us.append(vbits)
                        vs.append(ubits)
    if not us:
        return np.empty((0, 2), np.int64)
    return np.stack([np.array(us, dtype=np.int64),
                     np.array(vs, dtype=np.int64)], axis=1)


def sample_graph(params: KroneckerParams, n: int, seed: SampleSeed,
                 cap: int = DEFAULT_GRAPH_CAP) -> GraphStore:
    """One exact sample of the n-dimensional Kronecker graph (grouped
    backend); see sample_edge_arrays for the pair law."""
    if not 1 <= n <= MAX_DIMENSION:
        raise ParameterError(f"dimension n={n} outside [1, {MAX_DIMENSION}]")
    if n > cap:
        raise ResourceLimitError(
            f"n={n} exceeds the graph materialization cap {cap}")
    return GraphStore.from_edges(1 << n, sample_edge_arrays(params, n, seed), n=n)


def _pair_prob_arrays(params: KroneckerParams, u: np.ndarray, v: np.ndarray,
                      n: int) -> np.ndarray:
    """edge_probability across two aligned label arrays, vectorized."""
    a = u.astype(np.uint64)
    b = v.astype(np.uint64)
    c11 = np.bitwise_count(a & b).astype(np.int64)
    c10 = np.bitwise_count(a ^ b).astype(np.int64)
    c00 = n - c11 - c10
    return (np.power(params.alpha, c11, dtype=np.float64)
            * np.power(params.beta, c10, dtype=np.float64)
            * np.power(params.gamma, c00, dtype=np.float64))


def _pair_prob_vector(params: KroneckerParams, vbits: int,
                      others: np.ndarray, n: int) -> np.ndarray:
    """edge_probability of one label against an array of labels."""
    return _pair_prob_arrays(params, np.full(others.size, vbits, dtype=np.uint64),
                             others, n)


def sample_graph_naive(params: KroneckerParams, n: int, seed: SampleSeed,
                       cap: int = DEFAULT_GRAPH_CAP) -> GraphStore:
    """Brute-force reference backend: one uniform per unordered pair."""
    if n > cap:
        raise ResourceLimitError(
            f"n={n} exceeds the graph materialization cap {cap}")
    rng = seed.rng()
    total = 1 << n
    labels = np.arange(total, dtype=np.uint64)
    us, vs = [], []
    for v in range(total - 1):
        others = labels[v + 1:]
        p = _pair_prob_vector(params, v, others, n)
        hit = rng.random(others.size) < p
        if hit.any():
            sel = others[hit].astype(np.int64)
            us.append(np.full(sel.size, v, dtype=np.int64))
            vs.append(sel)
    if us:
        pairs = np.stack([np.concatenate(us), np.concatenate(vs)], axis=1)
    else:
        pairs = np.empty((0, 2), np.int64)
    return GraphStore.from_edges(total, pairs, n=n)


def sample_induced_subgraph(params: KroneckerParams, labels: np.ndarray, n: int,
                            seed: SampleSeed) -> GraphStore:
    """Exact sample of the subgraph a full Kronecker sample would induce on a
    sorted label subset (edges are pair-independent, so restricting the vertex
    set first leaves the law unchanged).  Vertex ids are subset positions."""
    labels = np.asarray(labels, dtype=np.uint64)
    m = labels.size
    if m > 4096:
        raise ResourceLimitError(f"induced sampling over {m} vertices exceeds cap")
    rng = seed.rng()
    iu, iv = np.triu_indices(m, k=1)
    p = _pair_prob_arrays(params, labels[iu], labels[iv], n)
    hit = rng.random(p.size) < p
    pairs = np.stack([iu[hit], iv[hit]], axis=1)
    return GraphStore.from_edges(m, pairs)


# --- lazy, pair-consistent backend ---------------------------------------

def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def pair_uniform(seed: SampleSeed, lo: int, hi: int) -> float:
    """Deterministic uniform in [0, 1) attached to the unordered pair
    {lo, hi}; the lazy backend keeps edge {u, v} iff this value is below the
    pair's edge probability."""
    h = _HASH_INIT
    for v in (seed.seed & _MASK64, seed.stream & _MASK64, lo, hi):
        h = _mix64((h + v + _GOLD) & _MASK64)
    return (h >> 11) * 2.0 ** -53


def _mix64_vec(h: np.ndarray) -> np.ndarray:
    h = (h ^ (h >> np.uint64(30))) * np.uint64(_MIX1)
    h = (h ^ (h >> np.uint64(27))) * np.uint64(_MIX2)
    return h ^ (h >> np.uint64(31))


def pair_uniform_array(seed_value: int, streams, lo, hi) -> np.ndarray:
    """Vectorized pair_uniform; streams, lo, hi broadcast against each other."""
    with np.errstate(over="ignore"):
        gold = np.uint64(_GOLD)
        h0 = _mix64((_HASH_INIT + (seed_value & _MASK64) + _GOLD) & _MASK64)
        h = _mix64_vec(np.uint64(h0) + np.asarray(streams, np.uint64) + gold)
        h = _mix64_vec(h + np.asarray(lo, np.uint64) + gold)
        h = _mix64_vec(h + np.asarray(hi, np.uint64) + gold)
        return (h >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def _pair_uniform_vector(seed: SampleSeed, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return pair_uniform_array(seed.seed, seed.stream & _MASK64, lo, hi)


class LazyNeighborhoods:
    """On-demand neighborhoods under the pair-consistent hash backend.

    Querying from u and from v agrees on the edge {u, v} by construction.
    Neighbor arrays are memoized, so repeated BFS passes pay for each vertex
    once.
    """

    def __init__(self, params: KroneckerParams, n: int, seed: SampleSeed,
                 cap: int = DEFAULT_GRAPH_CAP):
        if n > cap:
            raise ResourceLimitError(
                f"n={n} exceeds the lazy enumeration cap {cap}")
        self.params = params
        self.n = n
        self.seed = seed
        self.vertex_count = 1 << n
        self._labels = np.arange(self.vertex_count, dtype=np.uint64)
        self._cache: dict[int, np.ndarray] = {}

    def neighbors(self, v: int) -> np.ndarray:
        got = self._cache.get(v)
        if got is not None:
            return got
        others = np.delete(self._labels, v)
        p = _pair_prob_vector(self.params, v, others, self.n)
        v64 = np.full(others.size, v, dtype=np.uint64)
        lo = np.minimum(v64, others)
        hi = np.maximum(v64, others)
        hit = _pair_uniform_vector(self.seed, lo, hi) < p
        result = others[hit].astype(np.int64)
        self._cache[v] = result
        return result

    def bfs_distances(self, source: int) -> np.ndarray:
        """Distances in the same convention as graphkit.bfs (UNREACHABLE
        sentinel), without ever materializing the graph."""
        dist = np.full(self.vertex_count, UNREACHABLE, dtype=np.int32)
        dist[source] = 0
        frontier = [source]
        level = 0
        while frontier:
            level += 1
            cand = np.concatenate([self.neighbors(v) for v in frontier])
            cand = np.unique(cand[dist[cand] == UNREACHABLE])
            dist[cand] = level
            frontier = cand.tolist()
        return dist


def lazy_neighborhood(params: KroneckerParams, v: VertexLabel,
                      seed: SampleSeed) -> set[VertexLabel]:
    """Neighborhood of v under the lazy backend; same marginal law as
    sample_neighbors, but pair-consistent across queries."""
    lazy = LazyNeighborhoods(params, v.n, seed)
    return {VertexLabel(int(b), v.n) for b in lazy.neighbors(v.bits)}


def materialize_lazy(params: KroneckerParams, n: int, seed: SampleSeed,
                     cap: int = 16) -> GraphStore:
    """The full graph the lazy backend would reveal: every pair evaluated
    through the same hash.  Quadratic in 2^n; intended for cross-checks."""
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds the lazy materialization cap {cap}")
    total = 1 << n
    labels = np.arange(total, dtype=np.uint64)
    us, vs = [], []
    for v in range(total - 1):
        others = labels[v + 1:]
        p = _pair_prob_vector(params, v, others, n)
        lo = np.full(others.size, v, dtype=np.uint64)
        hit = _pair_uniform_vector(seed, lo, others) < p
        if hit.any():
            sel = others[hit].astype(np.int64)
            us.append(np.full(sel.size, v, dtype=np.int64))
            vs.append(sel)
    if us:
        pairs = np.stack([np.concatenate(us), np.concatenate(vs)], axis=1)
    else:
        pairs = np.empty((0, 2), np.int64)
    return GraphStore.from_edges(total, pairs, n=n)
