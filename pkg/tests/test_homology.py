from fractions import Fraction as F

import numpy as np
import pytest

from coamoeba_lab.chains import PolyhedralChain
from coamoeba_lab.errors import EmptyComplementError, PreconditionError, SnappingError
from coamoeba_lab.homology import (CubicalComplex, CubicalGrid, betti_numbers,
                                   boundary_squared_is_zero, class_is_zero, oracle,
                                   rasterize_complement)
from coamoeba_lab.polyhedral import AffineSubspace

BOX3 = [(-1, 1)] * 3
BOX2 = [(-1, 1)] * 2
Z_AXIS = AffineSubspace.make((0, 0, 0), [(0, 0, 1)])


def test_plane_separates_the_box():
    plane = AffineSubspace.make((0, 0, 0), [(1, 0, 0), (0, 1, 0)])
    cx = rasterize_complement([plane], BOX3, 10)
    assert betti_numbers(cx) == [2, 0, 0, 0]


def test_axis_complement_is_a_circle():
    cx = rasterize_complement([Z_AXIS], BOX3, 10)
    assert betti_numbers(cx)[:2] == [1, 1]
    assert betti_numbers(cx, reduced=True) == [0, 1, 0, 0]


def test_empty_obstacle_is_contractible():
    cx = rasterize_complement([], BOX3, 6)
    assert betti_numbers(cx) == [1, 0, 0, 0]


def test_two_lines_in_the_plane():
    lines = [AffineSubspace.make((0, 0), [(1, 0)]), AffineSubspace.make((0, 0), [(0, 1)])]
    assert betti_numbers(rasterize_complement(lines, BOX2, 16)) == [4, 0, 0]
    point = AffineSubspace.make((0, 0), [])
    assert betti_numbers(rasterize_complement([point], BOX2, 16)) == [1, 1, 0]


@pytest.mark.parametrize("res", [8, 12])
def test_boundary_squared(res):
    cx = rasterize_complement([Z_AXIS], BOX3, res)
    assert boundary_squared_is_zero(cx)


def test_betti_numbers_are_resolution_stable():
    # skew lines 2/3 apart: two unlinked arcs, so a genus-two handlebody
    obstacles = [Z_AXIS.translate((F(1, 3), F(1, 3), 0)),
                 AffineSubspace.make((0, F(-1, 3), 0), [(1, 0, 0)])]
    a = betti_numbers(rasterize_complement(obstacles, BOX3, 20))
    b = betti_numbers(rasterize_complement(obstacles, BOX3, 32))
    assert a == b == [1, 2, 0, 0]


def square(shift=(0, 0), z=F(1, 3)):
    sx, sy = shift
    h = F(1, 2)
    return PolyhedralChain.polygon_boundary(
        [(sx - h, sy - h, z), (sx + h, sy - h, z), (sx + h, sy + h, z), (sx - h, sy + h, z)])


def test_loop_classes():
    cx = rasterize_complement([Z_AXIS], BOX3, 12)
    assert not class_is_zero(cx, square())
    assert class_is_zero(cx, square(shift=(F(1, 2), F(1, 2))) if False else square2())
    assert class_is_zero(cx, square() - square(z=F(-1, 3)))


def square2():
    # small square away from the axis
    pts = [(F(4, 10), F(4, 10), 0), (F(8, 10), F(4, 10), 0), (F(8, 10), F(8, 10), 0),
           (F(4, 10), F(8, 10), 0)]
    return PolyhedralChain.polygon_boundary(pts)


def test_point_classes():
    plane = AffineSubspace.make((0, 0, 0), [(1, 0, 0), (0, 1, 0)])
    cx = rasterize_complement([plane], BOX3, 20)
    same = PolyhedralChain.build([([(F(1, 3), 0, F(2, 5))], 1), ([(F(-1, 3), 0, F(7, 10))], -1)], 0, 3)
    across = PolyhedralChain.build([([(0, 0, F(2, 5))], 1), ([(0, 0, F(-2, 5))], -1)], 0, 3)
    assert class_is_zero(cx, same)
    assert not class_is_zero(cx, across)
    with pytest.raises(PreconditionError):
        class_is_zero(cx, PolyhedralChain.build([([(0, 0, F(2, 5))], 1)], 0, 3))


def test_snapping_failures():
    grid = CubicalGrid(BOX2, 4)
    with pytest.raises(SnappingError):
        grid.snap_vertex((F(-3, 4), 0))  # midway between grid vertices
    with pytest.raises(SnappingError):
        grid.snap_vertex((3, 0))
    cx = rasterize_complement([AffineSubspace.make((0, 0), [(1, 0)])], BOX2, 8)
    through = PolyhedralChain.build([([(F(1, 10), F(1, 40))], 1), ([(F(-1, 3), F(3, 4))], -1)], 0, 2)
    with pytest.raises(SnappingError):
        class_is_zero(cx, through)


def test_rasterization_preconditions():
    with pytest.raises(PreconditionError):
        rasterize_complement([Z_AXIS], BOX3, 8, dilation=0.01)
    with pytest.raises(EmptyComplementError):
        rasterize_complement([AffineSubspace.make((0, 0), [(1, 0), (0, 1)])], BOX2, 8)
    with pytest.raises(ValueError):
        CubicalGrid(BOX2, 0)


def test_kept_cubes_respect_the_dilation():
    dil = 0.3
    cx = rasterize_complement([Z_AXIS], BOX3, 16, dilation=dil)
    shape = cx.shape
    verts = np.array(np.unravel_index(np.flatnonzero(cx.present), shape)).T
    pts = cx.grid.doubled_to_point(verts)
    assert np.hypot(pts[:, 0], pts[:, 1]).min() > dil


def test_cloud_obstacles():
    theta = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    ring = np.stack([0.5 * np.cos(theta), 0.5 * np.sin(theta)], axis=1)
    cx = rasterize_complement([], BOX2, 32, cloud=ring, cloud_dilation=0.1)
    # inside disc plus the annulus between ring and frame
    assert betti_numbers(cx) == [2, 1, 0]


def test_oracle_callable():
    decide = oracle(BOX3, 12)
    assert decide(square(), [Z_AXIS]) is False
    assert decide(square(), []) is True


def test_from_top_cubes_closure():
    grid = CubicalGrid(BOX2, 2)
    keep = np.array([True, False, False, False])
    cx = CubicalComplex.from_top_cubes(grid, keep)
    assert [cx.count(d) for d in range(3)] == [4, 4, 1]
