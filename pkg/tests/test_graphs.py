"""Graph construction, reduction, and component handling."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quac.errors import ConstructionError, InputError, ParameterError
from quac.graphs import (
    LaplacianMatrix,
    MarkSet,
    PointCloud,
    WeightedGraph,
    build_epsilon_graph,
    connected_components,
    graph_laplacian,
    reduced_laplacian,
    remove_outliers,
)

from reference import dense_laplacian


def ring(n):
    return WeightedGraph(n, {(i, (i + 1) % n): 1.0 for i in range(n)})


def random_graph(rng, n, p=0.3, weighted=False):
    edges = {}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges[(u, v)] = float(rng.uniform(0.2, 2.0)) if weighted else 1.0
    return WeightedGraph(n, edges)


class TestPointCloud:
    def test_from_array_default_ids(self):
        cloud = PointCloud.from_array(np.zeros((4, 2)))
        assert cloud.ids == (0, 1, 2, 3)
        assert cloud.n == 4
        assert cloud.dim == 2

    def test_select_preserves_ids(self):
        cloud = PointCloud.from_array(np.arange(10.0).reshape(5, 2))
        sub = cloud.select([3, 1])
        assert sub.ids == (3, 1)
        assert sub.points[0, 0] == 6.0
        assert np.array_equal(sub.points[1], cloud.coords(1))

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InputError):
            PointCloud(np.zeros((2, 2)), (1, 1))

    def test_unknown_id(self):
        cloud = PointCloud.from_array(np.zeros((2, 2)))
        with pytest.raises(InputError):
            cloud.coords(99)


class TestWeightedGraph:
    def test_edge_canonicalization(self):
        g = WeightedGraph(3, {(2, 0): 1.5, (0, 1): 1.0})
        assert g.weight(0, 2) == 1.5
        assert g.weight(2, 0) == 1.5
        assert (0, 2) in g.edges and (2, 0) not in g.edges

    def test_zero_weight_edges_dropped(self):
        g = WeightedGraph(3, {(0, 1): 0.0, (1, 2): 1.0})
        assert g.n_edges == 1

    def test_self_loop_rejected(self):
        with pytest.raises(InputError):
            WeightedGraph(2, {(0, 0): 1.0})

    def test_negative_weight_rejected(self):
        with pytest.raises(InputError):
            WeightedGraph(2, {(0, 1): -1.0})

    def test_default_vertex_ids(self):
        assert ring(4).vertex_ids == (0, 1, 2, 3)

    def test_degrees_ring(self):
        assert np.array_equal(ring(5).degrees(), np.full(5, 2.0))

    def test_json_round_trip(self):
        g = WeightedGraph(4, {(0, 1): 1.0, (1, 3): 0.25}, (10, 11, 12, 13))
        back = WeightedGraph.from_json(g.to_json())
        assert back == g

    def test_malformed_json(self):
        with pytest.raises(InputError):
            WeightedGraph.from_json_dict({"n": 2})


class TestEpsilonGraph:
    def test_threshold_is_strict(self):
        """Points at distance exactly eps are NOT joined."""
        cloud = PointCloud.from_array(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.9]]))
        g = build_epsilon_graph(cloud, 1.0)
        assert (0, 1) not in g.edges
        assert g.weight(1, 2) == 1.0

    def test_unit_weights(self):
        rng = np.random.default_rng(3)
        cloud = PointCloud.from_array(rng.normal(size=(30, 2)))
        g = build_epsilon_graph(cloud, 1.2)
        assert all(w == 1.0 for w in g.edges.values())

    def test_ids_carried_over(self):
        cloud = PointCloud(np.zeros((3, 2)), (7, 8, 9))
        assert build_epsilon_graph(cloud, 0.5).vertex_ids == (7, 8, 9)

    def test_bad_eps(self):
        cloud = PointCloud.from_array(np.zeros((2, 2)))
        for eps in (0.0, -1.0, float("inf"), float("nan")):
            with pytest.raises(ParameterError):
                build_epsilon_graph(cloud, eps)

    @given(st.integers(min_value=2, max_value=20), st.floats(0.1, 3.0))
    @settings(max_examples=50, deadline=None)
    def test_matches_brute_force(self, n, eps):
        rng = np.random.default_rng(n * 1000 + int(eps * 100))
        pts = rng.normal(size=(n, 2))
        g = build_epsilon_graph(PointCloud.from_array(pts), eps)
        for u in range(n):
            for v in range(u + 1, n):
                expected = float(np.linalg.norm(pts[u] - pts[v])) < eps
                assert ((u, v) in g.edges) == expected


class TestLaplacian:
    def test_matches_entrywise_assembly(self):
        rng = np.random.default_rng(11)
        g = random_graph(rng, 12, weighted=True)
        L = graph_laplacian(g)
        ref = dense_laplacian(g.n, [(u, v, w) for (u, v), w in g.edges.items()])
        assert np.allclose(L.entries, ref)

    def test_row_sums_vanish(self):
        g = random_graph(np.random.default_rng(5), 15, weighted=True)
        L = graph_laplacian(g)
        assert np.max(np.abs(L.entries.sum(axis=1))) < 1e-9

    def test_vertex_weights_on_diagonal(self):
        g = ring(4)
        L = graph_laplacian(g, {2: 5.0})
        assert L.entries[2, 2] == 2.0 + 5.0
        assert L.vertex_weights[2] == 5.0

    def test_unknown_vertex_weight_id(self):
        with pytest.raises(InputError):
            graph_laplacian(ring(3), {17: 1.0})

    def test_asymmetric_rejected(self):
        with pytest.raises(InputError):
            LaplacianMatrix(np.array([[1.0, -0.5], [0.0, 1.0]]), (0, 1))

    def test_positive_offdiagonal_rejected(self):
        with pytest.raises(InputError):
            LaplacianMatrix(np.array([[1.0, 0.5], [0.5, 1.0]]), (0, 1))

    def test_json_round_trip_exact(self):
        g = random_graph(np.random.default_rng(7), 8, weighted=True)
        L = graph_laplacian(g, {3: 0.75})
        back = LaplacianMatrix.from_json(L.to_json())
        assert np.array_equal(back.entries, L.entries)
        assert back.vertex_ids == L.vertex_ids


@st.composite
def graphs(draw):
    n = draw(st.integers(min_value=2, max_value=24))
    seed = draw(st.integers(min_value=0, max_value=2**16))
    rng = np.random.default_rng(seed)
    p = draw(st.floats(0.05, 0.6))
    return random_graph(rng, n, p, weighted=draw(st.booleans()))


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_laplacian_invariants(g):
    """Row sums vanish, matrix is PSD, kernel dimension counts components."""
    L = graph_laplacian(g)
    assert np.max(np.abs(L.entries.sum(axis=1))) < 1e-9
    vals = np.linalg.eigvalsh(L.entries)
    assert vals[0] > -1e-9
    n_comp = len(connected_components(g))
    scale = max(1.0, vals[-1])
    assert int(np.sum(vals < 1e-8 * scale)) == n_comp


class TestReduction:
    def test_path_graph_frozen_spectrum(self):
        """Three-vertex path with an endpoint marked: eigenvalues (3±sqrt(5))/2."""
        g = WeightedGraph(3, {(0, 1): 1.0, (1, 2): 1.0})
        red = reduced_laplacian(graph_laplacian(g), MarkSet.of([0]))
        assert red.vertex_ids == (1, 2)
        assert np.allclose(red.entries, [[2.0, -1.0], [-1.0, 1.0]])
        vals = np.linalg.eigvalsh(red.entries)
        expected = [(3 - np.sqrt(5)) / 2, (3 + np.sqrt(5)) / 2]
        assert np.allclose(vals, expected, atol=1e-12)

    def test_delete_shrinks_dimension(self):
        L = graph_laplacian(ring(6))
        red = reduced_laplacian(L, MarkSet.of([0, 3]))
        assert red.n == 4
        assert red.vertex_ids == (1, 2, 4, 5)

    def test_penalty_keeps_dimension(self):
        L = graph_laplacian(ring(6))
        red = reduced_laplacian(L, MarkSet.of([0]), mode="penalty", penalty_weight=100.0)
        assert red.n == 6
        assert red.entries[0, 0] == L.entries[0, 0] + 100.0

    def test_penalty_spectrum_approaches_deletion(self):
        """Large penalties reproduce the deleted submatrix's low spectrum."""
        g = random_graph(np.random.default_rng(23), 10, 0.4, weighted=True)
        L = graph_laplacian(g)
        marks = MarkSet.of([1, 4])
        hard = reduced_laplacian(L, marks)
        soft = reduced_laplacian(L, marks, mode="penalty", penalty_weight=1e8)
        lo_hard = np.linalg.eigvalsh(hard.entries)
        lo_soft = np.linalg.eigvalsh(soft.entries)[: hard.n]
        assert np.allclose(lo_hard, lo_soft, atol=1e-5)

    def test_reduction_is_principal_submatrix(self):
        g = random_graph(np.random.default_rng(2), 9, 0.5)
        L = graph_laplacian(g)
        red = reduced_laplacian(L, MarkSet.of([0, 5]))
        keep = [i for i in range(9) if i not in (0, 5)]
        assert np.array_equal(red.entries, L.entries[np.ix_(keep, keep)])

    def test_marks_must_exist(self):
        with pytest.raises(InputError):
            reduced_laplacian(graph_laplacian(ring(3)), MarkSet.of([9]))

    def test_marks_cannot_cover_everything(self):
        with pytest.raises(InputError):
            reduced_laplacian(graph_laplacian(ring(3)), MarkSet.of([0, 1, 2]))

    def test_empty_marks_rejected(self):
        with pytest.raises(InputError):
            reduced_laplacian(graph_laplacian(ring(3)), MarkSet.of([]))

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            reduced_laplacian(graph_laplacian(ring(3)), MarkSet.of([0]), mode="taper")


class TestComponents:
    def test_two_triangles(self):
        edges = {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0,
                 (3, 4): 1.0, (4, 5): 1.0, (3, 5): 1.0}
        comps = connected_components(WeightedGraph(6, edges))
        assert comps == (frozenset({0, 1, 2}), frozenset({3, 4, 5}))

    def test_isolated_vertices(self):
        g = WeightedGraph(4, {(0, 1): 1.0})
        comps = connected_components(g)
        assert len(comps) == 3
        assert comps[0] == frozenset({0, 1})

    def test_ordering_largest_first_then_smallest_id(self):
        edges = {(0, 1): 1.0, (2, 3): 1.0, (4, 5): 1.0, (4, 6): 1.0}
        comps = connected_components(WeightedGraph(7, edges))
        assert [len(c) for c in comps] == [3, 2, 2]
        assert comps[1] == frozenset({0, 1})

    def test_ids_reported_not_indices(self):
        g = WeightedGraph(3, {(0, 2): 1.0}, (20, 30, 40))
        comps = connected_components(g)
        assert comps == (frozenset({20, 40}), frozenset({30}))


class TestOutlierRemoval:
    def test_small_component_dropped(self):
        # K10 plus an edge pair: at fraction 0.2 the threshold is ceil(2.4)=3
        edges = {(u, v): 1.0 for u in range(10) for v in range(u + 1, 10)}
        edges[(10, 11)] = 1.0
        g = WeightedGraph(12, edges)
        cleaned = remove_outliers(g, 0.2)
        assert cleaned.n == 10
        assert set(cleaned.vertex_ids) == set(range(10))

    def test_minimum_threshold_is_two(self):
        """Tiny fractions still delete singletons (threshold floors at 2)."""
        edges = {(u, v): 1.0 for u in range(5) for v in range(u + 1, 5)}
        g = WeightedGraph(6, edges)  # vertex 5 isolated
        assert remove_outliers(g, 0.05).n == 5
        assert remove_outliers(g, 0.0).n == 5

    def test_pair_survives_low_fraction(self):
        edges = {(u, v): 1.0 for u in range(10) for v in range(u + 1, 10)}
        edges[(10, 11)] = 1.0
        cleaned = remove_outliers(WeightedGraph(12, edges), 0.01)
        assert cleaned.n == 12

    def test_edges_reindexed(self):
        edges = {(0, 1): 1.0, (1, 2): 1.0, (2, 0): 1.0, (3, 4): 2.0}
        cleaned = remove_outliers(WeightedGraph(5, edges, (9, 8, 7, 6, 5)), 0.5)
        assert cleaned.n == 3
        assert set(cleaned.vertex_ids) == {9, 8, 7}
        assert cleaned.weight(0, 1) == 1.0

    def test_everything_removed_raises(self):
        g = WeightedGraph(4, {})
        with pytest.raises(ConstructionError):
            remove_outliers(g, 0.9)

    def test_bad_fraction(self):
        with pytest.raises(ParameterError):
            remove_outliers(ring(3), 1.5)


class TestMarkSet:
    def test_iteration_sorted(self):
        assert list(MarkSet.of([5, 1, 3])) == [1, 3, 5]

    def test_validate(self):
        MarkSet.of([1, 2]).validate_against((1, 2, 3))
        with pytest.raises(InputError):
            MarkSet.of([4]).validate_against((1, 2, 3))
