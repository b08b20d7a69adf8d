"""Metric construction and validation."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rbmedian.metric import (
    GraphSpec,
    MetricError,
    from_graph,
    from_matrix,
)


class TestFromMatrix:
    def test_single_point(self):
        space = from_matrix([[0]])
        assert space.n == 1
        assert space.integral
        assert space.d(0, 0) == 0

    def test_two_points(self):
        space = from_matrix([[0, 1], [1, 0]])
        assert space.d(0, 1) == 1

    def test_zero_distance_between_distinct_points_allowed(self):
        space = from_matrix([[0, 0], [0, 0]])
        assert space.d(0, 1) == 0

    def test_float_input_uses_float_path(self):
        space = from_matrix([[0.0, 1.5], [1.5, 0.0]])
        assert not space.integral
        assert space.d(0, 1) == 1.5

    def test_triangle_violation_reports_witness(self):
        with pytest.raises(MetricError) as exc:
            from_matrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
        assert exc.value.witness == (0, 1, 2)
        assert "3" in str(exc.value)

    def test_asymmetry_reports_witness(self):
        with pytest.raises(MetricError) as exc:
            from_matrix([[0, 2], [1, 0]])
        assert exc.value.witness == (0, 1)

    def test_negative_entry_reports_witness(self):
        with pytest.raises(MetricError) as exc:
            from_matrix([[0, -1], [-1, 0]])
        assert exc.value.witness == (0, 1)

    def test_nonzero_diagonal_reports_witness(self):
        with pytest.raises(MetricError) as exc:
            from_matrix([[1]])
        assert exc.value.witness == (0, 0)

    def test_non_square_rejected(self):
        with pytest.raises(MetricError):
            from_matrix([[0, 1]])

    def test_triangle_check_can_be_skipped(self):
        bad = [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
        space = from_matrix(bad, check_triangle=False)
        assert space.d(0, 2) == 3

    def test_float_tolerance_accepts_tiny_violations(self):
        eps = 1e-13
        table = [[0.0, 1.0, 2.0 + eps], [1.0, 0.0, 1.0], [2.0 + eps, 1.0, 0.0]]
        space = from_matrix(table)
        assert not space.integral
        with pytest.raises(MetricError):
            from_matrix(table, tau=0.0)


class TestFromGraph:
    def test_path_graph_closure(self):
        space = from_graph(GraphSpec(n=3, edges=((0, 1, 1), (1, 2, 1))))
        assert space.d(0, 2) == 2
        assert space.integral

    def test_disconnected_pair_gets_sentinel(self):
        # no edges at all: sentinel is 1 + 0
        space = from_graph(GraphSpec(n=2, edges=()))
        assert space.d(0, 1) == 1

    def test_sentinel_exceeds_every_edge_sum(self):
        space = from_graph(GraphSpec(n=4, edges=((0, 1, 3), (1, 2, 4))))
        assert space.d(0, 3) == 1 + 3 + 4
        assert space.d(0, 2) == 7

    def test_explicit_sentinel_value(self):
        space = from_graph(GraphSpec(n=2, edges=(), sentinel_policy=99))
        assert space.d(0, 1) == 99

    def test_parallel_edges_collapse_to_shortest(self):
        space = from_graph(GraphSpec(n=2, edges=((0, 1, 5), (0, 1, 2))))
        assert space.d(0, 1) == 2

    def test_fractional_lengths_produce_float_space(self):
        space = from_graph(GraphSpec(n=2, edges=((0, 1, 0.5),)))
        assert not space.integral
        assert space.d(0, 1) == 0.5

    def test_endpoint_out_of_range_rejected(self):
        with pytest.raises(MetricError):
            from_graph(GraphSpec(n=2, edges=((0, 2, 1),)))

    def test_negative_length_rejected(self):
        with pytest.raises(MetricError):
            from_graph(GraphSpec(n=2, edges=((0, 1, -1),)))

    def test_gap_graph_distances(self):
        # smallest member of the worst-case family: co-located pairs at 0,
        # cross-island pairs at the sentinel (sum of edges is 14)
        from rbmedian.gap_gen import GapParams, build

        gap = build(GapParams(p=1, ell=2))
        lay = gap.layout
        d = gap.instance.space.d
        assert d(lay.left_clients[0], lay.left_reference_reds[0]) == 0
        assert d(lay.left_clients[0], lay.right_local_blues[0]) == 15
        assert d(lay.left_clients[0], lay.hub_red) == gap.params.alpha


@st.composite
def graphs(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    n_edges = draw(st.integers(min_value=0, max_value=20))
    edges = []
    for _ in range(n_edges):
        u = draw(st.integers(min_value=0, max_value=n - 1))
        v = draw(st.integers(min_value=0, max_value=n - 1))
        w = draw(st.integers(min_value=0, max_value=30))
        edges.append((u, v, w))
    return GraphSpec(n=n, edges=tuple(edges))


class TestClosureProperties:
    @given(graphs())
    @settings(max_examples=150, deadline=None)
    def test_graph_closure_is_a_valid_metric(self, spec):
        space = from_graph(spec)
        # exact revalidation: symmetry, zero diagonal, triangle with tau=0
        revalidated = from_matrix(space.dist, tau=0.0, check_triangle=True)
        assert np.array_equal(revalidated.dist, space.dist)

    @given(graphs())
    @settings(max_examples=100, deadline=None)
    def test_closure_is_idempotent(self, spec):
        space = from_graph(spec)
        # feed the closed metric back in as a complete graph
        edges = tuple(
            (i, j, space.rows[i][j])
            for i in range(space.n)
            for j in range(i + 1, space.n)
        )
        again = from_graph(GraphSpec(n=space.n, edges=edges, sentinel_policy="auto"))
        assert np.array_equal(again.dist, space.dist)


class TestMetricSpaceSurface:
    def test_rows_are_plain_python_scalars(self):
        space = from_matrix([[0, 2], [2, 0]])
        assert isinstance(space.rows[0][1], int)

    def test_dist_array_is_read_only(self):
        space = from_matrix([[0, 2], [2, 0]])
        with pytest.raises(ValueError):
            space.dist[0, 1] = 5
