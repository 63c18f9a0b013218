import numpy as np
import pytest

from conftest import (complete_graph, cycle_graph, empty_graph, hypercube_graph,
                      path_graph)
from kronkit.edgelist import read_edge_list, write_edge_list
from kronkit.errors import ParameterError
from kronkit.graphkit import (UNREACHABLE, GraphStore, bfs,
                              connected_components, diameter_exact,
                              edge_disjoint_short_paths, induced_subgraph)
from kronkit.model import KroneckerParams
from kronkit.sampler import SampleSeed, sample_graph


def all_pairs_diameter_oracle(g):
    """Brute force: eccentricity of every vertex of the largest component."""
    comps = connected_components(g)
    sizes = np.bincount(comps.labels)
    members = np.flatnonzero(comps.labels == sizes.argmax())
    best = 0
    for v in members:
        d = bfs(g, int(v)).dist
        best = max(best, int(d[d != UNREACHABLE].max()))
    return best


class TestGraphStore:
    def test_from_edges_canonicalizes(self):
        g = GraphStore.from_edges(4, [(2, 1), (1, 2), (0, 3)])
        assert g.edge_count == 2
        u, v = g.edges()
        assert list(zip(u, v)) == [(0, 3), (1, 2)]

    def test_rejects_self_loop(self):
        with pytest.raises(ParameterError):
            GraphStore.from_edges(3, [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ParameterError):
            GraphStore.from_edges(3, [(0, 3)])

    def test_edge_count_is_half_degree_sum(self):
        g = cycle_graph(10)
        assert g.edge_count == int(g.degrees().sum()) // 2

    def test_validate_passes_on_good_graph(self):
        complete_graph(6).validate()


class TestBfs:
    def test_complete(self):
        res = bfs(complete_graph(8), 3)
        expected = np.ones(8)
        expected[3] = 0
        assert np.array_equal(res.dist, expected)
        assert res.reached_count == 8

    def test_empty(self):
        res = bfs(empty_graph(5), 2)
        assert res.dist[2] == 0
        assert (res.dist != UNREACHABLE).sum() == 1

    def test_path(self):
        res = bfs(path_graph(4), 0)
        assert res.dist.tolist() == [0, 1, 2, 3]

    def test_parents_trace_shortest_paths(self):
        res = bfs(cycle_graph(9), 0, return_parents=True)
        # walking parents from any vertex descends one level per step
        for v in range(1, 9):
            steps = 0
            node = v
            while res.parent[node] != -1:
                node = res.parent[node]
                steps += 1
            assert steps == res.dist[v]

    def test_invalid_source(self):
        with pytest.raises(ParameterError):
            bfs(path_graph(3), 5)

    def test_sentinel_never_zero(self):
        assert UNREACHABLE > 0


class TestComponents:
    def test_complete(self):
        assert connected_components(complete_graph(7)).count == 1

    def test_empty_cube(self):
        assert connected_components(empty_graph(64, n=6)).count == 64

    def test_two_triangles(self):
        g = GraphStore.from_edges(
            6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        comps = connected_components(g)
        assert comps.count == 2
        assert comps.labels[0] == comps.labels[1] == comps.labels[2]
        assert comps.labels[3] == comps.labels[4] == comps.labels[5]
        assert comps.labels[0] != comps.labels[3]


class TestDiameter:
    def test_complete(self):
        res = diameter_exact(complete_graph(9))
        assert (res.diameter, res.connected) == (1, True)

    def test_cycle_closed_form(self):
        for k in (3, 5, 8):
            assert diameter_exact(cycle_graph(2 * k)).diameter == k

    def test_hypercube_closed_form(self):
        for n in (3, 5, 7):
            g = hypercube_graph(n)
            assert diameter_exact(g, method="all-pairs").diameter == n
            assert diameter_exact(g, method="ifub").diameter == n

    def test_disconnected_reports_largest_component(self):
        g = GraphStore.from_edges(7, [(0, 1), (1, 2), (2, 3), (4, 5)])
        res = diameter_exact(g)
        assert not res.connected
        assert res.component_size == 4
        assert res.diameter == 3

    def test_kronecker_sample_matches_all_pairs_oracle(self, supercritical):
        g = sample_graph(supercritical, 8, SampleSeed(20260810))
        oracle = all_pairs_diameter_oracle(g)
        assert diameter_exact(g).diameter == oracle
        assert diameter_exact(g, method="ifub").diameter == oracle

    def test_ifub_equals_all_pairs_on_sparse_samples(self):
        params = KroneckerParams(0.4, 0.8, 0.4)
        for trial in range(4):
            g = sample_graph(params, 7, SampleSeed(99, trial))
            assert (diameter_exact(g, method="ifub").diameter
                    == all_pairs_diameter_oracle(g))

    def test_methods_agree_up_to_2_12(self, supercritical):
        g = sample_graph(supercritical, 12, SampleSeed(4))
        res = diameter_exact(g)  # auto picks ifub at 4096 vertices
        assert res.method == "ifub"
        slow = diameter_exact(g, method="all-pairs", all_pairs_limit=1 << 12)
        assert res.diameter == slow.diameter


class TestEdgeDisjointShortPaths:
    def test_three_disjoint_two_paths(self):
        # u=0, v=1, three internal vertices give three length-2 paths
        g = GraphStore.from_edges(5, [(0, 2), (2, 1), (0, 3), (3, 1),
                                      (0, 4), (4, 1)])
        assert edge_disjoint_short_paths(g, 0, 1, 2) == 3

    def test_no_path_within_budget(self):
        g = path_graph(6)
        assert edge_disjoint_short_paths(g, 0, 5, 4) == 0
        assert edge_disjoint_short_paths(g, 0, 5, 5) == 1

    def test_monotone_in_maxlen_and_degree_capped(self, supercritical):
        g = sample_graph(supercritical, 6, SampleSeed(17))
        u, v = 1, 40
        last = 0
        for maxlen in range(1, 7):
            got = edge_disjoint_short_paths(g, u, v, maxlen)
            assert got >= last
            last = got
        assert last <= min(g.degree(u), g.degree(v))

    def test_greedy_below_maxflow_oracle(self, supercritical):
        nx = pytest.importorskip("networkx")
        g = sample_graph(supercritical, 8, SampleSeed(23))
        gx = nx.Graph()
        gx.add_nodes_from(range(g.vertex_count))
        u_arr, v_arr = g.edges()
        gx.add_edges_from(zip(u_arr.tolist(), v_arr.tolist()))
        for u, v in [(0, 255), (3, 77), (10, 200)]:
            greedy = edge_disjoint_short_paths(g, u, v, 4)
            flow = nx.algorithms.connectivity.edge_connectivity(gx, u, v)
            assert greedy <= flow

    def test_identical_endpoints_error(self):
        with pytest.raises(ParameterError):
            edge_disjoint_short_paths(path_graph(3), 1, 1, 2)


class TestInducedSubgraph:
    def test_triangle_in_larger_graph(self):
        g = GraphStore.from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (4, 5)])
        sub = induced_subgraph(g, np.array([0, 1, 2]))
        assert sub.vertex_count == 3
        assert sub.edge_count == 3


class TestEdgeList:
    def test_round_trip(self, tmp_path, supercritical):
        g = sample_graph(supercritical, 6, SampleSeed(5))
        path = tmp_path / "g.txt"
        write_edge_list(path, g, params=supercritical, seed=5)
        back, meta = read_edge_list(path)
        assert np.array_equal(back.indices, g.indices)
        assert np.array_equal(back.indptr, g.indptr)
        assert meta["n"] == 6 and meta["seed"] == 5
        assert meta["alpha"] == 0.6 and meta["beta"] == 0.7

    def test_header_required(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("0 1\n")
        with pytest.raises(ParameterError):
            read_edge_list(bad)

    def test_unsorted_edge_rejected(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("# kron n=3\n2 1\n")
        with pytest.raises(ParameterError):
            read_edge_list(bad)

    def test_duplicate_edge_rejected(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("# kron n=3\n1 2\n1 2\n")
        with pytest.raises(ParameterError):
            read_edge_list(bad)
