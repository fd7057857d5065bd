import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcoverage.coverage import (CoverageMode, Point2D, Rect, RegionGrid, SensorNode,
                                aligned_region_template, build_coverage_graph,
                                cell_covered_pessimistic, disk_covers_point, local_region_template,
                                local_subgraph)
from kcoverage.errors import ConfigurationError


def node(i, x, y, r=15.0, comm=40.0, e=20.0):
    return SensorNode(i, Point2D(x, y), r, comm, e)


class TestDisk:
    def test_center(self):
        assert disk_covers_point((0, 0), 15, (0, 0))

    def test_boundary_is_covered(self):
        assert disk_covers_point((0, 0), 15, (15, 0))

    def test_outside(self):
        assert not disk_covers_point((0, 0), 15, (15.1, 0))


class TestPessimisticCell:
    def test_inside_threshold(self):
        # 15 - sqrt(2) * 3 = 10.757...
        assert cell_covered_pessimistic((0, 0), (10, 0), (0, 0), 15, 3)

    def test_beyond_threshold(self):
        assert not cell_covered_pessimistic((0, 0), (10.8, 0), (0, 0), 15, 3)

    def test_zero_size_cell_is_strict(self):
        assert not cell_covered_pessimistic((0, 0), (15, 0), (0, 0), 15, 0)
        assert cell_covered_pessimistic((0, 0), (14.999, 0), (0, 0), 15, 0)

    @given(st.floats(-20, 20), st.floats(-20, 20), st.floats(5, 20), st.floats(0.1, 3))
    def test_whole_square_inside_disk(self, dx, dy, R, delta):
        if cell_covered_pessimistic((0, 0), (dx, dy), (0, 0), R, delta):
            for sx in (-1, 0, 1):
                for sy in (-1, 0, 1):
                    assert disk_covers_point((0, 0), R, (dx + sx * delta, dy + sy * delta))

    @given(st.floats(-20, 20), st.floats(-20, 20), st.floats(0.1, 3), st.floats(0.0, 1.0))
    def test_shrinking_cell_keeps_edge(self, dx, dy, delta, shrink):
        if cell_covered_pessimistic((0, 0), (dx, dy), (0, 0), 15, delta):
            assert cell_covered_pessimistic((0, 0), (dx, dy), (0, 0), 15, delta * shrink)


def test_point_rejects_nan():
    with pytest.raises(ValueError):
        Point2D(float("nan"), 0)


def test_sensor_node_validation():
    with pytest.raises(ValueError):
        SensorNode(0, Point2D(0, 0), 0, 10, 1)
    with pytest.raises(ValueError):
        SensorNode(-1, Point2D(0, 0), 1, 10, 1)


class TestRegionGrid:
    def test_lattice_centers(self):
        g = RegionGrid(Point2D(1, 2), 2.0, 3, 2)
        c = g.centers
        assert len(c) == 6
        assert tuple(c[0]) == (2.0, 3.0)
        # row-major: id = j * n_cols + i
        assert tuple(c[4]) == tuple(g.center(1, 1)) == (4.0, 5.0)

    def test_covering_tiles_area(self):
        g = RegionGrid.covering(Rect(0, 0, 90, 45), 4.0)
        assert g.n_cols * g.cell_side >= 90 and g.n_rows * g.cell_side >= 45
        assert (g.n_cols, g.n_rows) == (23, 12)


class TestBuildGraph:
    def test_no_sensors(self):
        g = build_coverage_graph([], RegionGrid(Point2D(0, 0), 1.0, 4, 4))
        assert np.all(g.degrees() == 0)

    def test_single_disk(self):
        grid = RegionGrid(Point2D(0, 0), 2.0, 3, 3)
        g = build_coverage_graph([node(0, 3, 3, r=10)], grid)
        assert g.degrees()[4] == 1

    def test_four_disks_match_brute_force(self):
        nodes = [node(0, 10, 10, 9), node(1, 22, 10, 9), node(2, 16, 20, 9), node(3, 30, 22, 7)]
        grid = RegionGrid(Point2D(0, 0), 1.5, 27, 22)
        g = build_coverage_graph(nodes, grid)
        expected = []
        for j in range(grid.n_rows):
            for i in range(grid.n_cols):
                cx, cy = (i + 0.5) * 1.5, (j + 0.5) * 1.5
                expected.append(sum(1 for n in nodes
                                    if math.hypot(cx - n.position.x, cy - n.position.y) <= n.sensing_radius))
        assert g.degrees().tolist() == expected

    def test_adjacency_and_inverse_agree(self):
        nodes = [node(i, x, y, 6) for i, (x, y) in enumerate([(3, 3), (8, 4), (5, 9)])]
        g = build_coverage_graph(nodes, RegionGrid(Point2D(0, 0), 2.0, 6, 6))
        for r, s in g.edges():
            assert s in g.sensors_of(r) and r in g.regions_of(s)
        assert sum(len(g.regions_of(n.id)) for n in nodes) == int(g.degrees().sum())

    @settings(max_examples=40)
    @given(st.lists(st.tuples(st.floats(0, 30), st.floats(0, 30)), min_size=1, max_size=8),
           st.floats(3, 12), st.sampled_from([1.0, 2.0, 3.0]))
    def test_exact_is_superset_of_pessimistic(self, pts, r, side):
        nodes = [node(i, x, y, r) for i, (x, y) in enumerate(pts)]
        grid = RegionGrid.covering(Rect(0, 0, 30, 30), side)
        exact = build_coverage_graph(nodes, grid, CoverageMode.EXACT_CENTER).incidence
        pess = build_coverage_graph(nodes, grid, CoverageMode.PESSIMISTIC).incidence
        assert not np.any(pess & ~exact)


class TestTemplate:
    def test_default_layout_has_24_cells(self):
        t = local_region_template(15, 6, 0.86)
        assert len(t) == 24
        assert t.half_side == pytest.approx(2.5)
        # the three outermost cells of each corner are dropped
        assert (12.5, 12.5) not in set(t) and (12.5, 7.5) not in set(t) and (12.5, 2.5) in set(t)

    def test_two_by_two(self):
        assert len(local_region_template(15, 2, 1.0)) == 4

    def test_resolution_10_matches_enumeration(self):
        R, res, tau = 15.0, 10, 0.86
        side = 2 * R / res
        count = 0
        for i in range(res):
            for j in range(res):
                x = -R + (i + 0.5) * side
                y = -R + (j + 0.5) * side
                if math.sqrt(x * x + y * y) <= tau * R:
                    count += 1
        assert len(local_region_template(R, res, tau)) == count

    def test_resolution_too_small(self):
        with pytest.raises(ConfigurationError):
            local_region_template(15, 1)

    def test_aligned_equals_node_centred_on_lattice_points(self):
        for pos in [(50.0, 50.0), (10.0, 30.0), (0.0, 90.0)]:
            a = aligned_region_template(pos, 15, 6, 0.86, (0.0, 0.0))
            b = local_region_template(15, 6, 0.86)
            assert sorted(map(tuple, a.offsets.tolist())) == sorted(map(tuple, b.offsets.tolist()))

    def test_aligned_clipping_keeps_inside_cells(self):
        area = Rect(0, 0, 90, 90)
        t = aligned_region_template((0.0, 0.0), 15, 6, 0.86, (0.0, 0.0), area)
        assert len(t) == 6
        assert all(area.contains((dx, dy)) for dx, dy in t)


class TestLocalSubgraph:
    def test_no_neighbors(self):
        s = node(0, 0, 0)
        g = local_subgraph(s, [], local_region_template(15))
        assert np.all(g.degrees() == 1)

    def test_colocated_neighbor(self):
        s = node(0, 0, 0)
        t = local_region_template(15)
        g = local_subgraph(s, [node(1, 0, 0)], t)
        for idx, off in enumerate(t):
            expected = 2 if cell_covered_pessimistic((0, 0), off, (0, 0), 15, t.half_side) else 1
            assert g.degrees()[idx] == expected
        assert 1 in g.degrees().tolist()  # rim cells are pessimistically lost

    def test_rejects_self_in_neighbors(self):
        s = node(0, 0, 0)
        with pytest.raises(ValueError):
            local_subgraph(s, [s], local_region_template(15))

    def test_grid_interior_node_against_brute_force(self):
        nodes = [node(r * 10 + c, c * 10.0, r * 10.0) for r in range(10) for c in range(10)]
        s = nodes[44]
        others = [n for n in nodes if n.id != s.id]
        t = local_region_template(15)
        g = local_subgraph(s, others, t)
        delta = 2.5
        for idx, (dx, dy) in enumerate(t):
            cx, cy = 40 + dx, 40 + dy
            count = 1 + sum(1 for w in others
                            if 15 - math.sqrt(2) * delta > math.hypot(cx - w.position.x, cy - w.position.y))
            assert g.degrees()[idx] == count
