"""Exact rational linear algebra and polyhedral primitives.

Everything here works over ``fractions.Fraction``; no floating point enters
these computations.  Subspaces are canonicalized at construction (reduced row
echelon bases, basepoints reduced into the orthogonal complement of the
direction) so equality and hashing are structural.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence


# ---------------------------------------------------------------------------
# scalar and vector helpers


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def qvec(v: Iterable) -> tuple:
    return tuple(to_fraction(x) for x in v)


def fstr(x: Fraction) -> str:
    x = to_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vscale(c, v):
    return tuple(c * a for a in v)


def is_zero(v) -> bool:
    return all(x == 0 for x in v)


def primitive(v: Sequence) -> tuple:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    v = qvec(v)
    if is_zero(v):
        raise ValueError("zero vector has no primitive representative")
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in v]
    g = 0
    for a in ints:
        g = math.gcd(g, abs(a))
    return tuple(a // g for a in ints)


# ---------------------------------------------------------------------------
# matrices (lists of rows of Fractions)


def rref(rows: Sequence[Sequence], ncols: Optional[int] = None):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(qvec(r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[0])


def nullspace(rows: Sequence[Sequence], n: int) -> list:
    """Basis of {x : rows . x = 0}, one vector per free column."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    red, piv = rref(rows, n)
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, n: int):
    """One solution of rows . x = rhs, or None when inconsistent."""
    if not rows:
        return tuple(Fraction(0) for _ in range(n))
    aug = [tuple(qvec(r)) + (to_fraction(b),) for r, b in zip(rows, rhs)]
    red, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, piv):
        x[p] = row[n]
    return tuple(x)


def det(m: Sequence[Sequence]) -> Fraction:
    a = [list(qvec(r)) for r in m]
    size = len(a)
    d = Fraction(1)
    for c in range(size):
        piv = next((i for i in range(c, size) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, size):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class RationalSubspace:
    basis: tuple  # rows of the reduced row echelon form
    ambient_dim: int

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int) -> "RationalSubspace":
        vs = [qvec(v) for v in vectors]
        if not vs:
            return cls((), n)
        red, _ = rref(vs, n)
        return cls(tuple(red), n)

    @classmethod
    def zero(cls, n: int) -> "RationalSubspace":
        return cls((), n)

    @classmethod
    def full(cls, n: int) -> "RationalSubspace":
        return cls.span([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        v = qvec(v)
        if is_zero(v):
            return True
        return rank(list(self.basis) + [v], self.ambient_dim) == self.dim

    def complement(self) -> "RationalSubspace":
        """Orthogonal complement under the standard inner product."""
        return RationalSubspace.span(nullspace(self.basis, self.ambient_dim), self.ambient_dim)

    def projection(self, v) -> tuple:
        """Orthogonal projection of v onto this subspace."""
        n = self.ambient_dim
        if not self.basis:
            return tuple(Fraction(0) for _ in range(n))
        b = self.basis
        gram = [[dot(u, w) for w in b] for u in b]
        rhs = [dot(u, v) for u in b]
        coeffs = solve(gram, rhs, len(b))
        out = [Fraction(0)] * n
        for c, u in zip(coeffs, b):
            for i in range(n):
                out[i] += c * u[i]
        return tuple(out)

    def integer_basis(self) -> list:
        return [primitive(v) for v in self.basis]

    def to_json(self):
        return [[fstr(x) for x in v] for v in self.basis]

    @classmethod
    def from_json(cls, data, n: int) -> "RationalSubspace":
        return cls.span(data, n)


@functools.lru_cache(maxsize=4096)
def _pivots(basis: tuple, n: int) -> tuple:
    return tuple(rref(basis, n)[1])


@dataclass(frozen=True)
class AffineSubspace:
    basepoint: tuple
    direction: RationalSubspace

    @classmethod
    def make(cls, point, direction) -> "AffineSubspace":
        point = qvec(point)
        if not isinstance(direction, RationalSubspace):
            direction = RationalSubspace.span(direction, len(point))
        reduced = vsub(point, direction.projection(point))
        return cls(reduced, direction)

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    @property
    def dim(self) -> int:
        return self.direction.dim

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def equations(self):
        """Rows (normals) and right-hand sides cutting out the subspace."""
        normals = nullspace(self.direction.basis, self.ambient_dim) if self.direction.basis \
            else [tuple(Fraction(int(i == j)) for j in range(self.ambient_dim))
                  for i in range(self.ambient_dim)]
        return normals, [dot(a, self.basepoint) for a in normals]

    def contains(self, x) -> bool:
        return self.direction.contains(vsub(qvec(x), self.basepoint))

    def translate(self, v) -> "AffineSubspace":
        return AffineSubspace.make(vadd(self.basepoint, qvec(v)), self.direction)

    def point(self, coords) -> tuple:
        """basepoint + sum coords[i] * basis[i]."""
        p = list(self.basepoint)
        for c, b in zip(coords, self.direction.basis):
            c = to_fraction(c)
            for i in range(len(p)):
                p[i] += c * b[i]
        return tuple(p)

    def chart(self, x) -> tuple:
        """Coordinates of x in the (basepoint, RREF basis) chart.  x must lie in the subspace."""
        d = vsub(qvec(x), self.basepoint)
        return tuple(d[p] for p in _pivots(self.direction.basis, self.ambient_dim))

    def to_json(self):
        return {"basepoint": [fstr(x) for x in self.basepoint],
                "direction": self.direction.to_json()}

    @classmethod
    def from_json(cls, data) -> "AffineSubspace":
        p = qvec(data["basepoint"])
        return cls.make(p, RationalSubspace.span(data.get("direction", []), len(p)))

    def serialize(self) -> str:
        import json
        return json.dumps(self.to_json(), sort_keys=True)


def intersect_affine(a: AffineSubspace, b: AffineSubspace) -> Optional[AffineSubspace]:
    """Exact intersection of two affine subspaces; None when empty."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    n = a.ambient_dim
    ra, ea = a.equations()
    rb, eb = b.equations()
    rows = list(ra) + list(rb)
    rhs = list(ea) + list(eb)
    x = solve(rows, rhs, n)
    if x is None:
        return None
    return AffineSubspace.make(x, RationalSubspace.span(nullspace(rows, n), n))


# ---------------------------------------------------------------------------
# Fourier-Motzkin feasibility


def _normalize(coeffs, rhs, strict):
    scale = next((abs(c) for c in coeffs if c != 0), None)
    if scale is None:
        return tuple(coeffs), rhs, strict
    return tuple(c / scale for c in coeffs), rhs / scale, strict


def feasible(equalities=(), inequalities=(), n: Optional[int] = None) -> bool:
    """Decide whether {x : a.x = b for equalities, a.x <= b (or < b) for inequalities} is nonempty.

    ``equalities`` holds pairs (a, b); ``inequalities`` holds triples (a, b, strict).
    Exact, via Gaussian elimination of the equalities followed by Fourier-Motzkin.
    """
    eqs = [(list(qvec(a)), to_fraction(b)) for a, b in equalities]
    ineqs = [(list(qvec(a)), to_fraction(b), bool(s)) for a, b, s in inequalities]
    if n is None:
        n = len(eqs[0][0]) if eqs else (len(ineqs[0][0]) if ineqs else 0)
    # substitute equalities away
    while eqs:
        a, b = eqs.pop()
        j = next((k for k in range(n) if a[k] != 0), None)
        if j is None:
            if b != 0:
                return False
            continue
        aj = a[j]

        def subst(c, r, a=a, b=b, j=j, aj=aj):
            f = c[j] / aj
            if f == 0:
                return c, r
            return [ci - f * ai for ci, ai in zip(c, a)], r - f * b

        eqs = [subst(c, r) for c, r in eqs]
        ineqs = [subst(c, r) + (s,) for c, r, s in ineqs]
    system = {}
    for c, r, s in ineqs:
        _add_constraint(system, c, r, s)
    for j in range(n):
        pos, neg, rest = [], [], {}
        for key, (r, s) in system.items():
            c = key
            if c[j] > 0:
                pos.append((c, r, s))
            elif c[j] < 0:
                neg.append((c, r, s))
            else:
                rest[key] = (r, s)
        for cp, rp, sp in pos:
            for cn, rn, sn in neg:
                fp, fn = -cn[j], cp[j]
                c = tuple(fp * x + fn * y for x, y in zip(cp, cn))
                _add_constraint(rest, c, fp * rp + fn * rn, sp or sn)
        system = rest
        for key, (r, s) in system.items():
            if is_zero(key) and (r < 0 or (s and r == 0)):
                return False
    return all(r > 0 or (r == 0 and not s) for key, (r, s) in system.items() if is_zero(key))


def _add_constraint(system, coeffs, rhs, strict):
    c, r, s = _normalize(list(coeffs), to_fraction(rhs), strict)
    old = system.get(c)
    if old is None or r < old[0] or (r == old[0] and s and not old[1]):
        system[c] = (r, s)


# ---------------------------------------------------------------------------
# cones and fans


@dataclass(frozen=True)
class Cone:
    rays: tuple  # primitive integer vectors, sorted
    span: RationalSubspace

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence], n: int) -> "Cone":
        keep = sorted({primitive(g) for g in gens if not is_zero(qvec(g))})
        for r in list(keep):
            others = [q for q in keep if q != r]
            if others and _in_cone(others, r, strict=False):
                keep = others
        return cls(tuple(keep), RationalSubspace.span(keep, n))

    @property
    def ambient_dim(self) -> int:
        return self.span.ambient_dim

    @property
    def dim(self) -> int:
        return self.span.dim

    def relative_interior_point(self) -> tuple:
        n = self.ambient_dim
        p = [Fraction(0)] * n
        for r in self.rays:
            for i in range(n):
                p[i] += r[i]
        return tuple(p)

    def to_json(self):
        return {"rays": [list(r) for r in self.rays], "span": self.span.to_json()}


def _in_cone(rays, v, strict: bool) -> bool:
    n = len(v)
    m = len(rays)
    eqs = []
    for i in range(n):
        eqs.append(([Fraction(r[i]) for r in rays], v[i]))
    ineqs = []
    for j in range(m):
        a = [Fraction(0)] * m
        a[j] = Fraction(-1)
        ineqs.append((a, Fraction(0), strict))
    return feasible(eqs, ineqs, m)


def membership(cone: Cone, v) -> str:
    """Classify v as 'interior' (relative interior), 'boundary' or 'outside' of the cone."""
    v = qvec(v)
    if len(v) != cone.ambient_dim:
        raise ValueError("dimension mismatch")
    if not cone.rays:
        return "interior" if is_zero(v) else "outside"
    if not _in_cone(cone.rays, v, strict=False):
        return "outside"
    if _in_cone(cone.rays, v, strict=True):
        return "interior"
    return "boundary"


@dataclass
class Fan:
    cones: list
    face_relations: list = field(default_factory=list)  # (i, j): cone i is a face of cone j

    def maximal(self) -> list:
        above = {i for i, _ in self.face_relations}
        return [j for j in range(len(self.cones)) if j not in above]

    def check_common_faces(self) -> bool:
        """Pairwise check, on generators, that cones meet in a common face of the fan."""
        keys = {(c.rays, c.span) for c in self.cones}
        for a, b in itertools.combinations(self.cones, 2):
            in_b = [r for r in a.rays if membership(b, r) != "outside"]
            in_a = [r for r in b.rays if membership(a, r) != "outside"]
            if sorted(in_b) != sorted(in_a):
                return False
            if in_b:
                face = Cone.from_generators(in_b, a.ambient_dim)
                if (face.rays, face.span) not in keys:
                    return False
            # relative interiors of distinct cones must be disjoint
            if membership(b, a.relative_interior_point()) == "interior" and a.span == b.span \
                    and a.rays != b.rays:
                return False
        return True

    def to_json(self):
        return {"cones": [c.to_json() for c in self.cones],
                "face_relations": [list(p) for p in self.face_relations]}


# ---------------------------------------------------------------------------
# polyhedra in H-representation -> V-representation


def vrep(equalities, inequalities, n: int):
    """Generators of the closed polyhedron {E x = e, A x <= b}.

    Returns (vertices, rays, lineality) where vertices lie in the orthogonal
    complement of the lineality space, rays are primitive integer vectors and
    the lineality basis is primitive as well.  Assumes the polyhedron is nonempty.
    """
    eq_rows = [qvec(a) for a, _ in equalities]
    eq_rhs = [to_fraction(b) for _, b in equalities]
    in_rows = [qvec(a) for a, _ in inequalities]
    in_rhs = [to_fraction(b) for _, b in inequalities]
    lin = nullspace(eq_rows + in_rows, n) if (eq_rows or in_rows) else nullspace([], n)
    lin_rows = [tuple(v) for v in lin]
    base_rows = eq_rows + lin_rows
    base_rhs = eq_rhs + [Fraction(0)] * len(lin_rows)
    r0 = rank(base_rows, n) if base_rows else 0

    def ok(x, rows, rhs, homogeneous=False):
        for a, b in zip(rows, rhs):
            if dot(a, x) > (0 if homogeneous else b):
                return False
        return True

    vertices = set()
    need = n - r0
    for subset in itertools.combinations(range(len(in_rows)), need):
        rows = base_rows + [in_rows[i] for i in subset]
        if rank(rows, n) != n:
            continue
        x = solve(rows, base_rhs + [in_rhs[i] for i in subset], n)
        if x is not None and ok(x, in_rows, in_rhs):
            vertices.add(x)
    if need == 0:
        x = solve(base_rows, base_rhs, n) if base_rows else tuple(Fraction(0) for _ in range(n))
        if x is not None and ok(x, in_rows, in_rhs):
            vertices.add(x)
    rays = set()
    hom = [tuple(a) for a in eq_rows] + lin_rows
    for subset in itertools.combinations(range(len(in_rows)), max(need - 1, 0)):
        rows = hom + [in_rows[i] for i in subset]
        ns = nullspace(rows, n) if rows else nullspace([], n)
        if len(ns) != 1:
            continue
        r = ns[0]
        for cand in (r, vscale(-1, r)):
            if ok(cand, in_rows, in_rhs, homogeneous=True):
                rays.add(primitive(cand))
    return sorted(vertices), sorted(rays), [primitive(v) for v in lin]


# ---------------------------------------------------------------------------
# polytopes


@dataclass(frozen=True)
class Polytope:
    vertices: tuple  # sorted exact points
    facets: tuple  # (primitive outward normal, offset) relative to the affine hull
    dim: int
    ambient_dim: int

    def contains(self, x) -> bool:
        x = qvec(x)
        if not self.vertices:
            return False
        hull = affine_hull(self.vertices)
        if not hull.contains(x):
            return False
        return all(dot(nv, x) <= off for nv, off in self.facets)

    def to_json(self):
        return {"vertices": [[fstr(c) for c in v] for v in self.vertices],
                "facets": [{"normal": list(nv), "offset": fstr(off)} for nv, off in self.facets],
                "dim": self.dim}


def affine_hull(points) -> AffineSubspace:
    pts = [qvec(p) for p in points]
    p0 = pts[0]
    return AffineSubspace.make(p0, RationalSubspace.span([vsub(p, p0) for p in pts[1:]], len(p0)))


def convex_hull(points) -> Polytope:
    """Exact convex hull of finitely many rational points (desk-scale brute force).

    Facets come from every affinely independent d-subset whose hyperplane
    supports the set; a point is a vertex iff the normals of the facets
    through it span the hull's direction space.
    """
    pts = sorted({qvec(p) for p in points})
    if not pts:
        raise ValueError("empty point set")
    n = len(pts[0])
    hull = affine_hull(pts)
    d = hull.dim
    if d == 0:
        return Polytope(tuple(pts), (), 0, n)
    comp = hull.direction.complement().basis
    facets = set()
    for subset in itertools.combinations(pts, d):
        flat = [vsub(q, subset[0]) for q in subset[1:]]
        if d >= 2 and rank(flat, n) != d - 1:
            continue
        normal_space = nullspace(list(flat) + list(comp), n)
        if len(normal_space) != 1:
            continue
        nv = primitive(normal_space[0])
        vals = [dot(nv, q) for q in pts]
        off = dot(nv, subset[0])
        if all(v <= off for v in vals):
            facets.add((nv, off))
        elif all(v >= off for v in vals):
            facets.add((tuple(-c for c in nv), -off))
    vertices = []
    for p in pts:
        tight = [nv for nv, off in facets if dot(nv, p) == off]
        if tight and rank(tight, n) == d:
            vertices.append(p)
    return Polytope(tuple(vertices), tuple(sorted(facets)), d, n)


def minkowski_sum(p: Polytope, q: Polytope) -> Polytope:
    return convex_hull([vadd(a, b) for a in p.vertices for b in q.vertices])
