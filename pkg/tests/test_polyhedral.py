from fractions import Fraction as F

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from coamoeba_lab.polyhedral import (AffineSubspace, Cone, RationalSubspace, convex_hull,
                                     feasible, intersect_affine, membership, vrep)


def line(p, d):
    return AffineSubspace.make(p, [d])


def test_intersect_examples():
    assert intersect_affine(line((0, 0), (1, 0)), line((0, 1), (1, 0))) is None
    plane = AffineSubspace.make((0, 0, 0), [(1, 0, 0), (0, 1, 0)])
    hit = intersect_affine(plane, line((0, 0, 0), (1, 1, 1)))
    assert hit.dim == 0 and hit.basepoint == (0, 0, 0)
    a = line((F(1, 2), 0), (0, 1))
    b = line((0, F(1, 2)), (1, 1))
    assert intersect_affine(a, b).basepoint == (F(1, 2), F(1))


def test_membership_examples():
    quad = Cone.from_generators([(1, 0), (0, 1)], 2)
    assert membership(quad, (1, 1)) == "interior"
    assert membership(quad, (1, 0)) == "boundary"
    assert membership(quad, (-1, 0)) == "outside"


def test_cone_drops_redundant_generators():
    c = Cone.from_generators([(1, 0), (0, 1), (1, 1), (2, 2)], 2)
    assert c.rays == ((0, 1), (1, 0))


def test_canonical_forms_are_structural():
    a = AffineSubspace.make((3, 5), [(2, 2)])
    b = AffineSubspace.make((0, 2), [(-1, -1)])
    assert a == b and a.serialize() == b.serialize()
    assert RationalSubspace.span([(2, 4, 0)], 3) == RationalSubspace.span([(1, 2, 0)], 3)


def test_vrep_of_quadrant_shifted():
    verts, rays, lin = vrep([], [((-1, 0), -1), ((0, -1), 2)], 2)
    assert verts == [(1, -2)] and rays == [(0, 1), (1, 0)] and lin == []


_small = st.integers(-4, 4)
_vec3 = st.tuples(_small, _small, _small)


@st.composite
def affine3(draw):
    p = draw(_vec3)
    dirs = draw(st.lists(_vec3, max_size=2))
    return AffineSubspace.make(p, dirs)


@settings(max_examples=200, deadline=None)
@given(affine3(), affine3())
def test_intersection_symmetric_and_contained(a, b):
    ab, ba = intersect_affine(a, b), intersect_affine(b, a)
    assert (ab is None) == (ba is None)
    if ab is not None:
        assert ab.serialize() == ba.serialize()
        assert a.contains(ab.basepoint) and b.contains(ab.basepoint)
        for v in ab.direction.basis:
            assert a.direction.contains(v) and b.direction.contains(v)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.tuples(_small, _small), st.integers(-6, 6)), min_size=1, max_size=6))
def test_feasibility_matches_linprog(rows):
    # oracle: floating LP with a slack margin well above round-off
    ours = feasible([], [(a, b, False) for a, b in rows], 2)
    res = linprog(np.zeros(2), A_ub=np.array([a for a, _ in rows], float),
                  b_ub=np.array([b for _, b in rows], float), bounds=[(None, None)] * 2,
                  method="highs")
    assert ours == (res.status == 0)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(_small, _small), min_size=1, max_size=4), st.tuples(_small, _small))
def test_membership_matches_angles(gens, v):
    gens = [g for g in gens if g != (0, 0)]
    if not gens:
        return
    cone = Cone.from_generators(gens, 2)
    verdict = membership(cone, v)
    # oracle: nonnegative least squares on the generators
    from scipy.optimize import nnls
    A = np.array(cone.rays, float).T
    _, resid = nnls(A, np.array(v, float))
    assert (verdict != "outside") == (resid < 1e-9)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(_small, _small, _small), min_size=4, max_size=12))
def test_hull_vertices_match_scipy(pts):
    from scipy.spatial import ConvexHull
    arr = np.array(sorted(set(pts)), float)
    if len(arr) < 4 or np.linalg.matrix_rank(arr[1:] - arr[0]) < 3:
        return
    theirs = sorted(tuple(int(x) for x in arr[i]) for i in ConvexHull(arr).vertices)
    ours = sorted(tuple(int(x) for x in v) for v in convex_hull(pts).vertices)
    assert ours == theirs
