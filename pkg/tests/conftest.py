import numpy as np
import pytest

from kronkit.graphkit import GraphStore
from kronkit.model import KroneckerParams


@pytest.fixture
def supercritical():
    return KroneckerParams(0.6, 0.7, 0.6)


@pytest.fixture
def asymmetric():
    return KroneckerParams(0.5, 0.4, 0.3)


def complete_graph(v: int) -> GraphStore:
    iu, iv = np.triu_indices(v, k=1)
    return GraphStore.from_edges(v, np.stack([iu, iv], axis=1))


def empty_graph(v: int, n=None) -> GraphStore:
    return GraphStore.from_edges(v, [], n=n)


def path_graph(v: int) -> GraphStore:
    return GraphStore.from_edges(v, [(i, i + 1) for i in range(v - 1)])


def cycle_graph(v: int) -> GraphStore:
    return GraphStore.from_edges(v, [(i, (i + 1) % v) for i in range(v)])


def hypercube_graph(n: int) -> GraphStore:
    edges = [(v, v ^ (1 << i)) for v in range(1 << n) for i in range(n)
             if v < v ^ (1 << i)]
    return GraphStore.from_edges(1 << n, edges, n=n)
