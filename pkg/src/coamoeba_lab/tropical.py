"""Tropical hypersurfaces, tropical lines and tropical fans (max convention).

Cells are enumerated by joint tie patterns: for every polynomial, the set of
terms at which the tropical maximum is attained.  One routine,
``tie_complex``, handles any family of affine functions ``a.w + b`` so the
valued-field side can reuse it with its own convention.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import NonTransverseError, PreconditionError, UnsolvableError
from .laurent import LaurentPolynomial, VarietySpec
from .polyhedral import (AffineSubspace, Cone, Fan, RationalSubspace, dot, feasible, fstr,
                         nullspace, primitive, qvec, rank, solve, vadd, vrep, vscale,
                         vsub)


@dataclass(frozen=True)
class InitialForm:
    source: LaurentPolynomial
    weight: tuple
    result: LaurentPolynomial


def initial_form(f: LaurentPolynomial, w) -> InitialForm:
    """Sub-sum of the terms of f maximizing w . exponent."""
    w = qvec(w)
    if len(w) != f.ambient_dim:
        raise ValueError("weight dimension differs from polynomial dimension")
    vals = [dot(w, e) for e in f.exponents]
    top = max(vals)
    keep = [e for e, v in zip(f.exponents, vals) if v == top]
    return InitialForm(f, w, f.sub_sum(keep))


@dataclass
class Face:
    pattern: tuple  # per polynomial: sorted tuple of term labels attaining the maximum
    dim: int
    hull: AffineSubspace
    vertices: list
    rays: list
    lineality: list
    equalities: list = field(default_factory=list, repr=False)  # (a, b): a.w == b
    strict: list = field(default_factory=list, repr=False)  # (a, b): a.w < b
    generator_pattern: Optional[tuple] = None  # tie pattern of the input generators

    @property
    def tie_pattern(self) -> tuple:
        return self.generator_pattern if self.generator_pattern is not None else self.pattern

    def contains_relative(self, w) -> bool:
        w = qvec(w)
        return all(dot(a, w) == b for a, b in self.equalities) and \
            all(dot(a, w) < b for a, b in self.strict)

    def interior_point(self) -> tuple:
        """A rational point in the relative interior of the face."""
        n = self.hull.ambient_dim
        p = [Fraction(0)] * n
        for v in self.vertices:
            p = list(vadd(p, v))
        if self.vertices:
            p = [x / len(self.vertices) for x in p]
        for r in self.rays:
            p = list(vadd(p, r))
        return tuple(p)

    def random_interior_point(self, rng: random.Random) -> tuple:
        n = self.hull.ambient_dim
        weights = [Fraction(rng.randint(1, 9)) for _ in self.vertices]
        total = sum(weights)
        p = [Fraction(0)] * n
        for wgt, v in zip(weights, self.vertices):
            p = list(vadd(p, vscale(wgt / total, v)))
        for r in self.rays:
            p = list(vadd(p, vscale(Fraction(rng.randint(1, 9), rng.randint(1, 4)), r)))
        for l in self.lineality:
            p = list(vadd(p, vscale(Fraction(rng.randint(-9, 9), rng.randint(1, 4)), l)))
        return tuple(p)

    def to_json(self) -> dict:
        out = {"dim": self.dim,
               "affine_hull": self.hull.to_json(),
               "vertices": [[fstr(x) for x in v] for v in self.vertices],
               "rays": [list(r) for r in self.rays],
               "lineality": [list(r) for r in self.lineality],
               "tie_pattern": _pattern_json(self.tie_pattern)}
        if self.generator_pattern is not None:
            out["basis_pattern"] = _pattern_json(self.pattern)
        return out


def _pattern_json(pattern):
    return [[list(e) if isinstance(e, tuple) else e for e in part] for part in pattern]


@dataclass
class TropicalComplex:
    faces: list
    incidence: list = field(default_factory=list)  # (i, j): face i lies in the closure of face j
    ambient_dim: int = 0

    def faces_of_dim(self, d: int) -> list:
        return [f for f in self.faces if f.dim == d]

    def maximal_faces(self) -> list:
        lower = {i for i, _ in self.incidence}
        return [f for k, f in enumerate(self.faces) if k not in lower]

    def minimal_faces(self) -> list:
        upper = {j for _, j in self.incidence}
        return [f for k, f in enumerate(self.faces) if k not in upper]

    def locate(self, w) -> Optional[Face]:
        """The face whose relative interior contains w, or None off the complex."""
        for f in self.faces:
            if f.contains_relative(w):
                return f
        return None

    def to_json(self) -> dict:
        return {"n": self.ambient_dim,
                "faces": [f.to_json() for f in self.faces],
                "incidence": [list(p) for p in self.incidence]}


def tie_complex(functions, n: int, max_dim: Optional[int] = None) -> TropicalComplex:
    """Polyhedral complex of points where every family of affine functions has a tied maximum.

    ``functions[j]`` lists ``(label, a, b)`` for the affine function ``a . w + b``.
    Cells are indexed by the joint tie pattern; each must have at least two
    maximizers per family.  With ``max_dim`` set, any cell of larger dimension
    raises ``NonTransverseError``.
    """
    fams = [[(lab, qvec(a), Fraction(b)) for lab, a, b in fam] for fam in functions]
    choices = []
    for fam in fams:
        subsets = []
        for size in range(2, len(fam) + 1):
            subsets.extend(itertools.combinations(range(len(fam)), size))
        choices.append(subsets)
    faces = []
    for combo in itertools.product(*choices):
        eqs, ineqs = [], []
        for fam, chosen in zip(fams, combo):
            head = fam[chosen[0]]
            for k in chosen[1:]:
                other = fam[k]
                eqs.append((tuple(x - y for x, y in zip(head[1], other[1])), other[2] - head[2]))
            for k in range(len(fam)):
                if k not in chosen:
                    other = fam[k]
                    # other(w) < head(w)
                    ineqs.append((tuple(x - y for x, y in zip(other[1], head[1])),
                                  head[2] - other[2]))
        if not feasible(eqs, [(a, b, True) for a, b in ineqs], n):
            continue
        eq_rows = [a for a, _ in eqs]
        dim = n - (rank(eq_rows, n) if eq_rows else 0)
        pattern = tuple(tuple(sorted(fam[k][0] for k in chosen)) for fam, chosen in zip(fams, combo))
        if max_dim is not None and dim > max_dim:
            raise NonTransverseError(
                f"tie pattern {_pattern_text(pattern)} spans a cell of dimension {dim} "
                f"(expected at most {max_dim})")
        verts, rays, lin = vrep(eqs, ineqs, n)
        x0 = solve(eq_rows, [b for _, b in eqs], n) if eq_rows else tuple(Fraction(0) for _ in range(n))
        direction = RationalSubspace.span(nullspace(eq_rows, n), n) if eq_rows \
            else RationalSubspace.full(n)
        faces.append(Face(pattern, dim, AffineSubspace.make(x0, direction), verts, rays, lin,
                          eqs, ineqs))
    faces.sort(key=lambda f: (f.dim, _pattern_key(f.pattern)))
    incidence = []
    for i, a in enumerate(faces):
        for j, b in enumerate(faces):
            if i != j and all(set(pa) >= set(pb) for pa, pb in zip(a.pattern, b.pattern)):
                incidence.append((i, j))
    return TropicalComplex(faces, incidence, n)


def _pattern_key(pattern):
    return tuple(tuple(tuple(lab) if isinstance(lab, tuple) else (lab,) for lab in part)
                 for part in pattern)


def _pattern_text(pattern) -> str:
    return "[" + "; ".join("{" + ", ".join(str(lab) for lab in part) + "}" for part in pattern) + "]"


def _max_functions(polys):
    return [[(e, e, 0) for e in p.exponents] for p in polys]


def tropical_hypersurface(f: LaurentPolynomial) -> TropicalComplex:
    if len(f) < 2:
        raise PreconditionError("a monomial has empty tropical hypersurface")
    return tie_complex(_max_functions([f]), f.ambient_dim)


def _det(m):
    """Determinant over any commutative ring supporting +, * and unary minus."""
    if len(m) == 1:
        return m[0][0]
    total = None
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def line_circuits(rows):
    """Circuits (minimal-support vectors) of the row space of a rank-r matrix.

    ``rows`` holds ring elements with ``is_zero()``.  The row-space vector
    vanishing on a set T of r-1 columns has entries det(A[:, [j] + T]); the
    nonzero ones with inclusion-minimal support are returned as
    ``{column: coefficient}`` dictionaries in a deterministic order.
    """
    r = len(rows)
    ncols = len(rows[0])
    found = {}
    for T in itertools.combinations(range(ncols), r - 1):
        vec = {}
        for j in range(ncols):
            if j in T:
                continue
            sub = [[row[j]] + [row[t] for t in T] for row in rows]
            d = _det(sub)
            if not d.is_zero():
                vec[j] = d
        if vec:
            found.setdefault(tuple(sorted(vec)), vec)
    supports = sorted(found, key=lambda s: (len(s), s))
    minimal = [s for s in supports if not any(set(o) < set(s) for o in supports)]
    if not minimal:
        raise UnsolvableError("the linear system is rank deficient")
    return [found[s] for s in minimal]


def _linear_rows(polys):
    n = polys[0].ambient_dim
    rows = []
    for p in polys:
        row = [p.coefficient(tuple(int(i == j) for i in range(n))) for j in range(n)]
        row.append(p.coefficient((0,) * n))
        rows.append(row)
    return rows


def circuit_polynomials(polys) -> list:
    """Circuits of an affine-linear system, as Laurent polynomials (a tropical basis)."""
    n = polys[0].ambient_dim
    out = []
    for vec in line_circuits(_linear_rows(polys)):
        coeffs = {}
        for j, c in vec.items():
            coeffs[tuple(int(i == j) for i in range(n)) if j < n else (0,) * n] = c
        out.append(LaurentPolynomial.from_dict(coeffs, n))
    return out


def _check_no_monomials(basis, generators):
    for p in basis:
        if len(p) == 1:
            pats = [sorted(set(q.exponents)) for q in generators]
            raise NonTransverseError(
                f"the generators' tropical hypersurfaces are not transverse: the system implies "
                f"the monomial {p}; generator tie patterns {_pattern_text(pats)}")


def tag_generator_patterns(cx: TropicalComplex, pattern_of) -> None:
    """Record, on every face, the tie pattern of the input generators at an interior point."""
    for face in cx.faces:
        face.generator_pattern = pattern_of(face.interior_point())


def tropical_line(spec: VarietySpec) -> TropicalComplex:
    """Tropical line of a linear system, from the tropical basis of its circuits."""
    if spec.input_class != "line":
        raise PreconditionError("tropical_line needs a line specification")
    n = spec.ambient_dim
    gens = list(spec.polynomials)
    basis = circuit_polynomials(gens)
    _check_no_monomials(basis, gens)
    cx = tie_complex(_max_functions(basis), n, max_dim=1)
    tag_generator_patterns(
        cx, lambda w: tuple(tuple(initial_form(p, w).result.exponents) for p in gens))
    return cx


def tropical_variety(spec: VarietySpec) -> TropicalComplex:
    if spec.input_class == "hypersurface":
        return tropical_hypersurface(spec.polynomials[0])
    if spec.input_class == "line":
        return tropical_line(spec)
    return tie_complex(_max_functions(spec.polynomials), spec.ambient_dim, max_dim=spec.dim)


def tropical_basis(spec: VarietySpec) -> list:
    if spec.input_class == "line":
        return circuit_polynomials(list(spec.polynomials))
    return list(spec.polynomials)


# ---------------------------------------------------------------------------
# fans


@dataclass
class TropicalFan:
    spec: VarietySpec
    complex: TropicalComplex
    fan: Fan
    initial_systems: list  # per cone: initial forms of the input generators
    initial_bases: list  # per cone: initial forms of the tropical basis

    def maximal_indices(self) -> list:
        return self.fan.maximal()

    def initial_class(self, i: int) -> str:
        """'binomial', 'linear' or 'other' for the initial ideal basis of cone i."""
        system = self.initial_bases[i]
        if all(len(p) == 2 for p in system):
            return "binomial"
        if all(p.is_affine_linear() for p in system):
            return "linear"
        return "other"

    def to_json(self) -> dict:
        out = self.fan.to_json()
        maximal = set(self.maximal_indices())
        for i, c in enumerate(out["cones"]):
            c["maximal"] = i in maximal
            c["initial_system"] = [str(p) for p in self.initial_systems[i]]
            c["initial_basis"] = [str(p) for p in self.initial_bases[i]]
            c["tie_pattern"] = _pattern_json(self.complex.faces[i].tie_pattern)
        out["n"] = self.complex.ambient_dim
        return out


def tropical_fan(spec: VarietySpec) -> TropicalFan:
    if spec.input_class not in ("hypersurface", "line"):
        raise PreconditionError("tropical fans are computed for hypersurfaces and lines")
    cx = tropical_variety(spec)
    basis = tropical_basis(spec)
    n = spec.ambient_dim
    cones, systems, bases = [], [], []
    for face in cx.faces:
        gens = list(face.rays) + list(face.lineality) + [vscale(-1, l) for l in face.lineality]
        cones.append(Cone.from_generators(gens, n))
        systems.append(tuple(p.sub_sum(part) for p, part in zip(spec.polynomials, face.tie_pattern)))
        bases.append(tuple(p.sub_sum(part) for p, part in zip(basis, face.pattern)))
    fan = Fan(cones, list(cx.incidence))
    return TropicalFan(spec, cx, fan, systems, bases)


def balancing_defects(cx: TropicalComplex) -> dict:
    """Sum of primitive outgoing edge directions at each vertex (zero when balanced)."""
    out = {}
    for i, v in enumerate(cx.faces):
        if v.dim != 0:
            continue
        vert = v.vertices[0]
        total = [0] * cx.ambient_dim
        for j, e in enumerate(cx.faces):
            if e.dim != 1 or (i, j) not in cx.incidence:
                continue
            if e.rays:
                d = e.rays[0]
            else:
                other = next(p for p in e.vertices if p != vert)
                d = primitive(vsub(other, vert))
            total = [a + b for a, b in zip(total, d)]
        out[tuple(vert)] = tuple(total)
    return out
