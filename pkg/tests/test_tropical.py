import random
from fractions import Fraction

import pytest

from coamoeba_lab.errors import NonTransverseError, PreconditionError
from coamoeba_lab.laurent import VarietySpec, parse_polynomial
from coamoeba_lab.polyhedral import dot
from coamoeba_lab.tropical import (balancing_defects, initial_form, tropical_fan,
                                   tropical_hypersurface, tropical_line)


def P(text, n):
    return parse_polynomial(text, n)


def argmax_set(f, w):
    vals = {e: dot(w, e) for e in f.exponents}
    top = max(vals.values())
    return tuple(sorted(e for e, v in vals.items() if v == top))


def rays_with_pattern(cx):
    return {tuple(f.rays[0]): tuple(sorted(f.tie_pattern[0])) for f in cx.faces if f.dim == 1}


@pytest.mark.parametrize("w, expected", [((1, 0), [(1, 0)]),
                                         ((1, 1), [(0, 1), (1, 0)]),
                                         ((0, 0), [(0, 0), (0, 1), (1, 0)])])
def test_initial_form_examples(w, expected):
    assert initial_form(P("1 + x1 + x2", 2), w).result.exponents == expected


def test_tropical_line_of_triangle():
    cx = tropical_hypersurface(P("1 + x1 + x2", 2))
    verts = [f for f in cx.faces if f.dim == 0]
    assert len(verts) == 1 and verts[0].vertices == [(0, 0)]
    assert rays_with_pattern(cx) == {(1, 1): ((0, 1), (1, 0)),
                                     (-1, 0): ((0, 0), (0, 1)),
                                     (0, -1): ((0, 0), (1, 0))}


def test_binomial_is_a_hyperplane():
    cx = tropical_hypersurface(P("x1 + x2", 2))
    assert len(cx.faces) == 1 and cx.faces[0].dim == 1
    assert cx.faces[0].lineality in ([(1, 1)], [(-1, -1)])


def test_square():
    cx = tropical_hypersurface(P("1 + x1 + x2 + x1*x2", 2))
    assert rays_with_pattern(cx) == {(1, 0): ((1, 0), (1, 1)), (0, 1): ((0, 1), (1, 1)),
                                     (-1, 0): ((0, 0), (0, 1)), (0, -1): ((0, 0), (1, 0))}
    vertex = [f for f in cx.faces if f.dim == 0][0]
    assert len(vertex.tie_pattern[0]) == 4


def test_monomial_rejected():
    with pytest.raises(PreconditionError):
        tropical_hypersurface(P("3*x1", 2))


def test_hypersurface_membership_oracle():
    # independent check: w lies on the complex iff the argmax has at least two terms
    rng = random.Random(11)
    for text in ["1 + x1 + x2", "1 + x1 + x2 + x1*x2", "x1^2 + x2 + x1^-1*x2^-1 + 3"]:
        f = P(text, 2)
        cx = tropical_hypersurface(f)
        for _ in range(200):
            w = (Fraction(rng.randint(-6, 6), rng.randint(1, 3)),
                 Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
            top = argmax_set(f, w)
            face = cx.locate(w)
            assert (face is not None) == (len(top) >= 2)
            if face is not None:
                assert tuple(sorted(face.tie_pattern[0])) == top


def test_real_line_in_3_space(real_line_spec):
    cx = tropical_line(real_line_spec)
    assert max(f.dim for f in cx.faces) == 1
    for f in cx.faces:
        if f.dim == 1 and f.rays:
            r = f.rays[0]
            assert r in [(1, 1, 1), (-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    assert all(v == (0, 0, 0) for v in balancing_defects(cx).values())


def test_line_of_example_shadow_is_a_single_vertex():
    spec = VarietySpec.line([P("x + zeta3*y + 5*zeta3^2", 3), P("i*x + z - 7", 3)])
    cx = tropical_line(spec)
    assert len([f for f in cx.faces if f.dim == 0]) == 1
    assert len([f for f in cx.faces if f.dim == 1]) == 4


def test_constant_coefficient_lines_are_fans():
    # a bounded edge needs coefficients of distinct valuations; over C every line is a fan
    for texts in [("x1 + x2 + 1", "x1 + 2*x2 + x3"), ("x1 - x2 + 3", "2*x1 + x3 - i"),
                  ("x1 + zeta3*x2 + 1", "x2 + x3 + 1")]:
        cx = tropical_line(VarietySpec.line([P(t, 3) for t in texts]))
        verts = [f for f in cx.faces if f.dim == 0]
        assert [v.vertices for v in verts] == [[(0, 0, 0)]]
        assert all(not (f.dim == 1 and not f.rays) for f in cx.faces)


def test_non_transverse_line():
    spec = VarietySpec.line([P("x1 + x2", 3), P("x1 + 2*x2", 3)])
    with pytest.raises(NonTransverseError) as err:
        tropical_line(spec)
    assert "tie pattern" in str(err.value)


def _specs():
    return [VarietySpec.hypersurface(P("1 + x1 + x2", 2)),
            VarietySpec.hypersurface(P("1 + x1 + x2 + x1*x2", 2)),
            VarietySpec.hypersurface(P("1 + x1 + x2 + x3", 3)),
            VarietySpec.line([P("x1 + x2 + 1", 3), P("x1 + x3 + 2", 3)]),
            VarietySpec.line([P("x1 + x2 + 1", 3), P("x1 + 2*x2 + x3", 3)])]


@pytest.mark.parametrize("spec", _specs())
def test_face_consistency_and_purity(spec):
    fan = tropical_fan(spec)
    cx = fan.complex
    rng = random.Random(5)
    for face in cx.faces:
        for _ in range(10):
            w = face.random_interior_point(rng)
            for f, part in zip(spec.polynomials, face.tie_pattern):
                assert tuple(sorted(initial_form(f, w).result.exponents)) == tuple(sorted(part))
    top = spec.ambient_dim - spec.declared_codim
    assert all(cx.faces[i].dim == top for i in fan.maximal_indices())
    assert fan.fan.check_common_faces()


@pytest.mark.parametrize("spec", _specs())
def test_initial_forms_are_monotone(spec):
    fan = tropical_fan(spec)
    rng = random.Random(8)
    for i, j in fan.fan.face_relations:
        w = fan.complex.faces[j].random_interior_point(rng)
        for low, high in zip(fan.initial_systems[i], fan.initial_systems[j]):
            assert initial_form(low, w).result == high


def test_fan_of_triangle():
    fan = tropical_fan(VarietySpec.hypersurface(P("1 + x1 + x2", 2)))
    rays = {c.rays for c in fan.fan.cones}
    assert rays == {(), ((1, 1),), ((-1, 0),), ((0, -1),)}
    k = next(i for i, c in enumerate(fan.fan.cones) if c.rays == ((1, 1),))
    assert fan.initial_systems[k][0].exponents == [(0, 1), (1, 0)]
    assert all(fan.initial_class(i) == "binomial" for i in fan.maximal_indices())


def test_fan_of_generic_line(real_line_spec):
    fan = tropical_fan(real_line_spec)
    assert len(fan.maximal_indices()) == 4
