import numpy as np
import pytest

from gradsurf import (
    DegenerateNeighborhood,
    InsufficientPoints,
    MeshIndex,
    enumerate_combinations,
    locate_reference,
    select_simplex,
    validate_training_set,
)
from gradsurf.neighbors import axis_stencil, is_extrapolation


def mesh_training(nodes, n, fn):
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=1)
    y = fn(x)
    ts = validate_training_set((x, y.reshape(-1, 1)), n=n)
    return ts, MeshIndex(axes=tuple([nodes] * n))


class TestLocateReference:
    def test_mesh_lower_corner(self):
        nodes = np.array([0.0, 1.0, 2.0])
        ts, mesh = mesh_training(nodes, 3, lambda x: x.sum(axis=1))
        idx = locate_reference(ts, np.array([0.4, 1.7, 0.3]), mesh)
        assert tuple(ts.x[idx]) == (0.0, 1.0, 0.0)

    def test_query_on_node_is_that_node(self):
        nodes = np.array([0.0, 1.0, 2.0])
        ts, mesh = mesh_training(nodes, 1, lambda x: x.sum(axis=1))
        idx = locate_reference(ts, np.array([1.0]), mesh)
        assert ts.x[idx, 0] == 1.0

    def test_scattered_normalized_nearest(self):
        x = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 1.0]])
        ts = validate_training_set((x, np.zeros(3)), n=2)
        idx = locate_reference(ts, np.array([4.0, 0.0]))
        assert idx == 0


class TestSelectSimplex:
    def test_mesh_axis_aligned_corners(self):
        nodes = np.array([0.0, 1.0, 2.0])
        ts, mesh = mesh_training(nodes, 3, lambda x: x.sum(axis=1))
        ref = locate_reference(ts, np.array([0.4, 0.4, 0.4]), mesh)
        simplex = select_simplex(ts, np.array([0.4, 0.4, 0.4]), ref, mesh)
        aux_coords = sorted(tuple(ts.x[a]) for a in simplex.auxiliaries)
        assert aux_coords == [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)]

    def test_upper_boundary_steps_back(self):
        nodes = np.array([0.0, 1.0])
        ts, mesh = mesh_training(nodes, 2, lambda x: x.sum(axis=1))
        q = np.array([1.0, 1.0])
        ref = locate_reference(ts, q, mesh)
        simplex = select_simplex(ts, q, ref, mesh)
        assert tuple(ts.x[ref]) == (1.0, 1.0)
        assert len(simplex.auxiliaries) == 2

    def test_collinear_scattered_degenerate(self):
        x = np.stack([np.linspace(0, 1, 5), np.linspace(0, 2, 5)], axis=1)
        ts = validate_training_set((x, np.zeros(5)), n=2)
        with pytest.raises(DegenerateNeighborhood):
            select_simplex(ts, np.array([0.5, 1.0]), 0)

    def test_scattered_picks_independent_directions(self):
        x = np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [0.0, 0.1]])
        ts = validate_training_set((x, np.zeros(4)), n=2)
        q = np.array([0.05, 0.01])
        simplex = select_simplex(ts, q, 0)
        rows = ts.x[list(simplex.auxiliaries)] - ts.x[0]
        assert np.linalg.matrix_rank(rows) == 2


class TestEnumerateCombinations:
    def quad(self):
        # four points, no three collinear: every 3-subset is a valid simplex
        x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.2]])
        return validate_training_set((x, np.zeros(4)), n=2)

    def test_single_combination_is_base_simplex(self):
        ts = self.quad()
        q = np.array([0.3, 0.3])
        plan = enumerate_combinations(ts, q, 1)
        ref = locate_reference(ts, q)
        assert plan.c == 1
        assert plan.simplexes[0] == select_simplex(ts, q, ref)

    def test_four_points_four_combinations(self):
        ts = self.quad()
        plan = enumerate_combinations(ts, np.array([0.4, 0.4]), 4)
        assert plan.c == 4
        keys = {s.key() for s in plan.simplexes}
        assert len(keys) == 4
        subsets = {frozenset((s.reference, *s.auxiliaries)) for s in plan.simplexes}
        assert len(subsets) == 4  # all four 3-point subsets

    def test_exhaustion_raises(self):
        ts = self.quad()
        with pytest.raises(InsufficientPoints):
            enumerate_combinations(ts, np.array([0.4, 0.4]), 50)

    def test_invalid_count(self):
        ts = self.quad()
        with pytest.raises(InsufficientPoints):
            enumerate_combinations(ts, np.array([0.4, 0.4]), 0)

    def test_disjoint_blocks_when_points_abound(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(0, 1, (60, 2))
        ts = validate_training_set((x, np.zeros(60)), n=2)
        plan = enumerate_combinations(ts, np.array([0.5, 0.5]), 8)
        assert plan.c == 8
        point_sets = [frozenset((s.reference, *s.auxiliaries)) for s in plan.simplexes]
        # the first several combinations come from disjoint blocks
        assert len(point_sets[0] | point_sets[1] | point_sets[2]) == 9


class TestAxisStencil:
    def test_interior_cell_full_stencil(self):
        nodes = np.array([0.0, 1.0, 2.0, 3.0])
        ts, mesh = mesh_training(nodes, 1, lambda x: x.sum(axis=1))
        ref = locate_reference(ts, np.array([1.4]), mesh)
        st = axis_stencil(ts, mesh, ref, np.array([1.4]), axis=0)
        assert st.x == (0.0, 1.0, 2.0, 3.0)
        assert not st.missing_lower and not st.missing_upper

    def test_domain_edge_flags_missing_lower(self):
        nodes = np.array([0.0, 1.0, 2.0, 3.0])
        ts, mesh = mesh_training(nodes, 1, lambda x: x.sum(axis=1))
        ref = locate_reference(ts, np.array([0.4]), mesh)
        st = axis_stencil(ts, mesh, ref, np.array([0.4]), axis=0)
        assert st.missing_lower
        assert st.x[0] is None
        assert st.x[1:] == (0.0, 1.0, 2.0)

    def test_jittered_points_sorted_by_actual_coordinate(self):
        nodes = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        rng = np.random.default_rng(3)
        x = nodes.reshape(-1, 1) + rng.uniform(-0.4, 0.4, (5, 1))
        ts = validate_training_set((x, np.zeros(5)), n=1)
        mesh = MeshIndex(axes=(nodes,), jitter_fraction=0.4)
        ref = locate_reference(ts, np.array([1.6]), mesh)
        st = axis_stencil(ts, mesh, ref, np.array([1.6]), axis=0)
        xs = [v for v in st.x if v is not None]
        assert xs == sorted(xs)

    def test_layer_selects_outcome_column(self):
        nodes = np.array([0.0, 1.0, 2.0, 3.0])
        x = nodes.reshape(-1, 1)
        y = np.stack([nodes, 10 * nodes], axis=1)
        ts = validate_training_set((x, y), n=1, layer_count=2)
        mesh = MeshIndex(axes=(nodes,))
        st = axis_stencil(ts, mesh, 1, np.array([1.4]), axis=0, layer=1)
        assert st.y == (0.0, 10.0, 20.0, 30.0)


def test_is_extrapolation():
    x = np.vstack([np.zeros(2), np.eye(2)])
    ts = validate_training_set((x, np.zeros(3)), n=2)
    assert not is_extrapolation(ts, np.array([0.2, 0.2]))
    assert is_extrapolation(ts, np.array([1.5, 0.0]))
