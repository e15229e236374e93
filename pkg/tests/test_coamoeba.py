from fractions import Fraction as F

import numpy as np
import pytest

from coamoeba_lab.coamoeba import (PointCloud, SamplingGrid, certify, directed_distance, lifted,
                                   phase_limit_set, point_variety_cloud, sample_coamoeba, shell,
                                   translate_samples)
from coamoeba_lab.errors import UnsolvableError
from coamoeba_lab.laurent import VarietySpec, parse_polynomial
from coamoeba_lab.polyhedral import RationalSubspace
from coamoeba_lab.torus import AffineSubgroupCoset, enumerate_in_box, make_box

SMALL = SamplingGrid(angular_steps=120, radial_steps=121)


def hyp(text, n):
    return VarietySpec.hypersurface(parse_polynomial(text, n))


def coset(direction, offset):
    return AffineSubgroupCoset.make(direction, [F(x) for x in offset])


def closed_triangle_condition(points, tol=1e-9):
    # 1 + x + y = 0 with arg x = a, arg y = b forces the directions 0, a, b to leave
    # no gap wider than half a turn
    ang = np.sort(np.concatenate([np.zeros((len(points), 1)), np.mod(points, 1.0)], axis=1),
                  axis=1)
    gaps = np.diff(np.concatenate([ang, ang[:, :1] + 1.0], axis=1), axis=1)
    return np.all(gaps <= 0.5 + tol, axis=1)


def test_triangle_cloud_satisfies_gap_test(triangle_spec):
    cloud = sample_coamoeba(triangle_spec, SMALL)
    assert len(cloud) > 10000 and cloud.rejected == 0
    assert closed_triangle_condition(cloud.points).all()
    # both open triangles are populated
    c = np.mod(cloud.points + 0.5, 1.0) - 0.5
    assert ((c[:, 0] > 0.05) & (c[:, 1] < -0.05)).any()
    assert ((c[:, 0] < -0.05) & (c[:, 1] > 0.05)).any()
    assert not ((c[:, 0] > 0.05) & (c[:, 1] > 0.05)).any()


def test_gap_test_rejects_off_coamoeba_points():
    assert not closed_triangle_condition(np.array([[0.1, 0.9]])).any()
    assert closed_triangle_condition(np.array([[0.3, 0.6]])).all()


def test_samples_are_certified(real_line_spec):
    cloud = sample_coamoeba(real_line_spec, SMALL)
    assert certify(real_line_spec.polynomials, cloud.preimages).all()


def test_point_variety():
    cloud = point_variety_cloud(hyp("x1 - i", 1))
    assert cloud.points.tolist() == [[0.25]]


def test_unsolvable_hypersurface():
    with pytest.raises(UnsolvableError):
        sample_coamoeba(hyp("1 + x1^2*x2^2 + x1^3*x2 + x1*x2^3 + x1^2*x2^5", 2), SMALL)


def test_shell_of_triangle(triangle_spec):
    sh = shell(triangle_spec)
    assert set(sh.cosets) == {coset([(0, 1)], ("1/2", "0")), coset([(1, 0)], ("0", "1/2")),
                              coset([(1, 1)], ("0", "1/2"))}
    assert all(c.status == "exact" for c in sh.cosets)


def test_shell_of_binomial():
    sh = shell(hyp("x1 - x2", 2))
    assert sh.cosets == [coset([(1, 1)], ("0", "0"))]


def test_shell_of_real_line(real_line_spec):
    sh = shell(real_line_spec)
    assert len(sh.cosets) == 4
    assert all(c.dim == 1 for c in sh.cosets)
    # each coset direction is the span of its cone
    for m in sh.members:
        assert m.coset.direction == RationalSubspace.span(m.cone_rays, 3)


def test_shell_contains_phase_limits(triangle_spec, real_line_spec):
    for spec in (triangle_spec, real_line_spec):
        cloud = sample_coamoeba(spec, SMALL)
        far = cloud.log_modulus > 6
        assert far.sum() > 100
        assert shell(spec).distance(cloud.points[far]).max() < 0.02


def test_phase_limit_set_of_triangle_is_its_shell(triangle_spec):
    pls = phase_limit_set(triangle_spec)
    assert all(s.maximal and s.kind == "exact" for s in pls.strata)
    assert {c for s in pls.strata for c in s.cosets} == set(shell(triangle_spec).cosets)


def test_sampled_strata_are_torus_invariant():
    spec = hyp("1 + x1 + x2 + x3", 3)
    pls = phase_limit_set(spec, SamplingGrid(angular_steps=40, radial_steps=41))
    sampled = [s for s in pls.strata if s.kind == "sampled"]
    assert len(sampled) == 4  # the four rays of the tropical plane
    rng = np.random.default_rng(1)
    for s in sampled:
        basis = np.array([[float(x) for x in b] for b in s.span.basis])
        shifts = rng.uniform(0, 1, size=(5, basis.shape[0])) @ basis
        moved = translate_samples(s.cloud.subset(np.arange(200)), shifts)
        assert certify(s.initial_system, moved).all()
    for s in pls.strata:
        for c in s.cosets:
            pts = c.sample(20, rng)
            shift = rng.uniform(0, 1, size=(20, 1)) * np.array(
                [float(x) for x in c.direction.basis[0]])
            assert c.distance(pts + shift).max() < 1e-9


def test_closure_error_shrinks_under_refinement(triangle_spec):
    reference = sample_coamoeba(triangle_spec, SamplingGrid(angular_steps=400, radial_steps=401))
    sh = shell(triangle_spec)
    shell_pts = sh.sample(4000, np.random.default_rng(0))
    errors = []
    for steps in (25, 50, 100):
        cloud = sample_coamoeba(triangle_spec, SamplingGrid(angular_steps=steps,
                                                            radial_steps=steps + 1))
        target = np.concatenate([cloud.points, shell_pts])
        errors.append(directed_distance(reference.points, target).max())
    assert errors[0] > errors[1] > errors[2]


def test_lifted_shell_box_enumeration(triangle_spec):
    arr = lifted(shell(triangle_spec), box=make_box([(0, 2), (0, 2)]))
    lifts = arr.lifts()
    assert len(lifts) == 2 + 2 + 4
    assert lifted(PointCloud(np.zeros((1, 2)))).shape == (4, 2)


def test_empty_shell_arrangement():
    from coamoeba_lab.coamoeba import Shell
    assert enumerate_in_box(lifted(Shell([], 2), box=make_box([(0, 1), (0, 1)])),
                            make_box([(0, 1), (0, 1)])) == []
