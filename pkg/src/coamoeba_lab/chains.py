"""Polyhedral chains over the integers with exact rational vertices.

Chains are kept in a canonical form: simplices lying in a common affine
k-plane are overlaid, coefficients summed, and the result re-cut along its
own boundary, so two chains are geometrically equal exactly when their
canonical simplex lists coincide.  Degrees 0, 1 and 2 are supported.

Orientation conventions:

* a line is oriented by its reduced-echelon direction vector;
* a plane is oriented by its chart, the two pivot coordinates of its
  reduced-echelon basis, in increasing order;
* the linking number of a k-cycle ``c`` with an affine subspace ``M`` of
  codimension k+1 sums, over transverse intersections of the cone ``q * c``
  with ``M``, the coefficient times the sign of
  ``det[v_0 - q, ..., v_k - q, RREF basis of M]``.
"""

from __future__ import annotations

import bisect
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DegeneracyError, PreconditionError
from .polyhedral import (AffineSubspace, RationalSubspace, affine_hull, det, dot, feasible, fstr,
                         intersect_affine, qvec, rank, solve, vadd, vscale, vsub)


# ---------------------------------------------------------------------------
# simplices and chains


@dataclass(frozen=True)
class PLSimplex:
    vertices: tuple  # tuples of Fractions
    coefficient: int

    @property
    def degree(self) -> int:
        return len(self.vertices) - 1

    def is_degenerate(self) -> bool:
        if len(self.vertices) <= 1:
            return False
        v0 = self.vertices[0]
        return rank([vsub(v, v0) for v in self.vertices[1:]], len(v0)) < len(self.vertices) - 1

    def to_json(self) -> dict:
        return {"vertices": [[fstr(x) for x in v] for v in self.vertices],
                "coefficient": self.coefficient}


@dataclass(frozen=True)
class PolyhedralChain:
    simplices: tuple
    degree: int
    ambient_dim: int

    @classmethod
    def build(cls, items, degree: int, n: int) -> "PolyhedralChain":
        """Canonical chain from (vertices, coefficient) pairs or PLSimplex objects."""
        raw = []
        for it in items:
            if isinstance(it, PLSimplex):
                verts, coeff = it.vertices, it.coefficient
            else:
                verts, coeff = it
            verts = tuple(qvec(v) for v in verts)
            if len(verts) != degree + 1:
                raise ValueError(f"degree-{degree} simplex needs {degree + 1} vertices")
            if any(len(v) != n for v in verts):
                raise ValueError("vertex dimension differs from the ambient dimension")
            if coeff:
                raw.append((verts, int(coeff)))
        return cls(tuple(_canonicalize(raw, degree, n)), degree, n)

    @classmethod
    def zero(cls, degree: int, n: int) -> "PolyhedralChain":
        return cls((), degree, n)

    @classmethod
    def simplex(cls, vertices, coefficient: int = 1) -> "PolyhedralChain":
        vs = [qvec(v) for v in vertices]
        return cls.build([(vs, coefficient)], len(vs) - 1, len(vs[0]))

    @classmethod
    def polygon_boundary(cls, points, coefficient: int = 1) -> "PolyhedralChain":
        """Closed polygonal 1-cycle through the given points in order."""
        pts = [qvec(p) for p in points]
        segs = [((pts[i], pts[(i + 1) % len(pts)]), coefficient) for i in range(len(pts))]
        return cls.build(segs, 1, len(pts[0]))

    def is_zero(self) -> bool:
        return not self.simplices

    def _combine(self, other, sign) -> "PolyhedralChain":
        if other.degree != self.degree or other.ambient_dim != self.ambient_dim:
            raise ValueError("chains of different degree or dimension")
        items = [(s.vertices, s.coefficient) for s in self.simplices]
        items += [(s.vertices, sign * s.coefficient) for s in other.simplices]
        return PolyhedralChain.build(items, self.degree, self.ambient_dim)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, a: int) -> "PolyhedralChain":
        return PolyhedralChain.build([(s.vertices, a * s.coefficient) for s in self.simplices],
                                     self.degree, self.ambient_dim)

    def augmentation(self) -> int:
        return sum(s.coefficient for s in self.simplices) if self.degree == 0 else 0

    def support(self) -> tuple:
        """Canonical support: the chain's pieces with all coefficients set to 1, merged."""
        if self.degree == 0:
            return tuple(sorted(s.vertices[0] for s in self.simplices))
        if self.degree == 1:
            return _segment_support(self.simplices, self.ambient_dim)
        return _planar_support(self.simplices, self.ambient_dim)

    def vertices(self) -> list:
        return sorted({v for s in self.simplices for v in s.vertices})

    def to_json(self) -> dict:
        return {"degree": self.degree, "n": self.ambient_dim,
                "simplices": [s.to_json() for s in self.simplices]}

    @classmethod
    def from_json(cls, data) -> "PolyhedralChain":
        items = [(s["vertices"], s.get("coefficient", 1)) for s in data["simplices"]]
        n = int(data.get("n", len(data["simplices"][0]["vertices"][0]) if data["simplices"] else 0))
        return cls.build(items, int(data["degree"]), n)

    def value_at(self, p) -> int:
        """Coefficient at a point off the support of the boundary (top-degree pieces)."""
        p = qvec(p)
        if self.degree == 0:
            return sum(s.coefficient for s in self.simplices if s.vertices[0] == p)
        total = 0
        for s in self.simplices:
            if _in_closed_simplex(s.vertices, p):
                return s.coefficient
        return total


def boundary(c: PolyhedralChain) -> PolyhedralChain:
    if c.degree < 1:
        raise ValueError("boundary needs degree at least 1")
    items = []
    for s in c.simplices:
        for i in range(len(s.vertices)):
            face = s.vertices[:i] + s.vertices[i + 1:]
            items.append((face, s.coefficient * (-1) ** i))
    return PolyhedralChain.build(items, c.degree - 1, c.ambient_dim)


def is_cycle(c: PolyhedralChain) -> bool:
    if c.degree == 0:
        return c.augmentation() == 0
    return boundary(c).is_zero()


def cone(q, c: PolyhedralChain) -> PolyhedralChain:
    """The join q * c: every simplex [v0..vk] becomes [q, v0..vk]."""
    q = qvec(q)
    items = [((q,) + s.vertices, s.coefficient) for s in c.simplices]
    return PolyhedralChain.build(items, c.degree + 1, c.ambient_dim)


# ---------------------------------------------------------------------------
# canonical forms


def _canonicalize(raw, degree, n):
    if degree == 0:
        acc = {}
        for verts, a in raw:
            acc[verts[0]] = acc.get(verts[0], 0) + a
        return [PLSimplex((p,), a) for p, a in sorted(acc.items()) if a]
    live = [(v, a) for v, a in raw if not PLSimplex(v, a).is_degenerate()]
    if degree == 1:
        return _canonical_segments(live, n)
    if degree == 2:
        return _canonical_triangles(live, n)
    raise NotImplementedError("canonical forms are implemented up to degree 2")


def _line_of(a, b) -> AffineSubspace:
    return AffineSubspace.make(a, RationalSubspace.span([vsub(b, a)], len(a)))


def _line_key(a, b):
    """(pivot, direction with pivot entry 1, point of the line with zero pivot coordinate)."""
    d = vsub(b, a)
    p = next(i for i, x in enumerate(d) if x != 0)
    d = tuple(x / d[p] for x in d)
    base = tuple(x - a[p] * y for x, y in zip(a, d))
    return p, d, base


def _on_line(key, t):
    _, d, base = key
    return tuple(x + t * y for x, y in zip(base, d))


def _canonical_segments(raw, n):
    groups = {}
    for (a, b), coeff in raw:
        key = _line_key(a, b)
        p = key[0]
        if a[p] < b[p]:
            groups.setdefault(key, []).append((a[p], b[p], coeff))
        else:
            groups.setdefault(key, []).append((b[p], a[p], -coeff))
    out = []
    for key in sorted(groups):
        for lo, hi, coeff in _overlay_intervals(groups[key]):
            out.append(PLSimplex((_on_line(key, lo), _on_line(key, hi)), coeff))
    return out


def _overlay_intervals(intervals):
    """Merged (lo, hi, coefficient) pieces of a sum of weighted intervals."""
    cuts = sorted({t for lo, hi, _ in intervals for t in (lo, hi)})
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        coeff = sum(c for a, b, c in intervals if a <= lo and hi <= b)
        if pieces and pieces[-1][2] == coeff and pieces[-1][1] == lo:
            pieces[-1] = (pieces[-1][0], hi, coeff)
        else:
            pieces.append((lo, hi, coeff))
    return [p for p in pieces if p[2] != 0]


def _segment_support(simplices, n):
    groups = {}
    for s in simplices:
        key = _line_key(*s.vertices)
        p = key[0]
        groups.setdefault(key, []).append(tuple(sorted(v[p] for v in s.vertices)))
    out = []
    for key in sorted(groups):
        merged = []
        for lo, hi in sorted(groups[key]):
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
            else:
                merged.append((lo, hi))
        out.extend((_on_line(key, lo), _on_line(key, hi)) for lo, hi in merged)
    return tuple(out)


# -- planar overlay ---------------------------------------------------------


def _orient2(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


_FULL_PLANE = AffineSubspace.make((0, 0), [(1, 0), (0, 1)])


def _plane_of(verts) -> AffineSubspace:
    if len(verts[0]) == 2:
        return _FULL_PLANE
    return affine_hull(verts)


def _canonical_triangles(raw, n):
    groups = {}
    for verts, coeff in raw:
        plane = _plane_of(verts)
        groups.setdefault(plane, []).append((verts, coeff))
    out = []
    for plane in sorted(groups, key=lambda p: p.serialize()):
        tris = []
        for verts, coeff in groups[plane]:
            a, b, c = (plane.chart(v) for v in verts)
            if _orient2(a, b, c) < 0:
                b, c, coeff = c, b, -coeff
            tris.append(((a, b, c), coeff))
        overlay = PlanarOverlay.from_triangles(tris)
        for tri, coeff in overlay.triangulate():
            out.append(PLSimplex(tuple(plane.point(v) for v in tri), coeff))
    return out


def _segments_2d(tris):
    """Canonical boundary of positively oriented weighted 2D triangles."""
    raw = []
    for (a, b, c), coeff in tris:
        raw += [((a, b), coeff), ((b, c), coeff), ((c, a), coeff)]
    return [(s.vertices[0], s.vertices[1], s.coefficient) for s in _canonical_segments(raw, 2)]


def _segment_crossing_x(s, t):
    """x-coordinates where two 2D segments meet (empty, one point, or an overlap's ends)."""
    (a, b), (c, d) = s, t
    r = (b[0] - a[0], b[1] - a[1])
    q = (d[0] - c[0], d[1] - c[1])
    den = r[0] * q[1] - r[1] * q[0]
    w = (c[0] - a[0], c[1] - a[1])
    if den == 0:
        return []
    u = (w[0] * q[1] - w[1] * q[0]) / den
    v = (w[0] * r[1] - w[1] * r[0]) / den
    if 0 <= u <= 1 and 0 <= v <= 1:
        return [a[0] + u * r[0]]
    return []


def _y_at(seg, x):
    (a, b) = seg
    return a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])


def _in_triangle_2d(tri, p) -> int:
    """1 inside, 0 outside, -1 on the boundary."""
    a, b, c = tri
    d1, d2, d3 = _orient2(a, b, p), _orient2(b, c, p), _orient2(c, a, p)
    if d1 > 0 and d2 > 0 and d3 > 0:
        return 1
    if d1 < 0 or d2 < 0 or d3 < 0:
        return 0
    return -1


@dataclass
class PlanarOverlay:
    """Trapezoidal decomposition of a weighted planar 2-chain, cut along its own boundary."""
    xs: list
    slabs: list  # per slab: list of (lower seg, upper seg, coefficient)
    boundary: list  # canonical boundary segments (a, b, coefficient)

    @classmethod
    def from_triangles(cls, tris) -> "PlanarOverlay":
        bnd = _segments_2d(tris)
        if not bnd:
            return cls([], [], [])
        segs = [(a, b) for a, b, _ in bnd]
        boxes = [(min(a[0], b[0]), max(a[0], b[0]), min(a[1], b[1]), max(a[1], b[1]))
                 for a, b in segs]
        xs = {p[0] for s in segs for p in s}
        for i, j in itertools.combinations(range(len(segs)), 2):
            bi, bj = boxes[i], boxes[j]
            if bi[1] < bj[0] or bj[1] < bi[0] or bi[3] < bj[2] or bj[3] < bi[2]:
                continue
            xs.update(_segment_crossing_x(segs[i], segs[j]))
        xs = sorted(xs)
        slabs = []
        for x0, x1 in zip(xs, xs[1:]):
            xm = (x0 + x1) / 2
            span = []
            for (a, b, w), (lo, hi, _, _) in zip(bnd, boxes):
                if a[0] == b[0] or not (lo <= x0 and x1 <= hi):
                    continue
                # the chain is w higher on the left of a -> b
                span.append(((a, b), w) if a[0] < b[0] else ((b, a), -w))
            span.sort(key=lambda s: _y_at(s[0], xm))
            row, level = [], 0
            for (lower, jump), (upper, _) in zip(span, span[1:]):
                level += jump
                row.append((lower, upper, level))
            if span and level + span[-1][1] != 0:
                raise DegeneracyError("boundary multiplicities do not close up in a slab")
            slabs.append(row)
        overlay = cls(xs, slabs, bnd)
        overlay._check_boundary()
        return overlay

    def _check_boundary(self):
        polys = []
        for i, row in enumerate(self.slabs):
            x0, x1 = self.xs[i], self.xs[i + 1]
            for lower, upper, coeff in row:
                if coeff:
                    quad = [(x0, _y_at(lower, x0)), (x1, _y_at(lower, x1)),
                            (x1, _y_at(upper, x1)), (x0, _y_at(upper, x0))]
                    raw = [((quad[j], quad[(j + 1) % 4]), coeff) for j in range(4)]
                    polys.extend(raw)
        got = [(s.vertices[0], s.vertices[1], s.coefficient) for s in _canonical_segments(
            [(v, a) for v, a in polys if v[0] != v[1]], 2)]
        if got != self.boundary:
            raise DegeneracyError("overlay coefficients are inconsistent with the chain boundary")

    def value_at(self, p) -> int:
        x, y = p
        if not self.xs or x < self.xs[0] or x > self.xs[-1]:
            return 0
        i = bisect.bisect_right(self.xs, x) - 1
        i = min(i, len(self.slabs) - 1)
        for lower, upper, coeff in self.slabs[i]:
            if _y_at(lower, x) <= y <= _y_at(upper, x):
                return coeff
        return 0

    def triangulate(self):
        """Conforming triangulation of the nonzero trapezoids, fanned from their centroids."""
        verts_on = {}
        kept = []
        for i, row in enumerate(self.slabs):
            x0, x1 = self.xs[i], self.xs[i + 1]
            for lower, upper, coeff in row:
                if coeff == 0:
                    continue
                corners = ((x0, _y_at(lower, x0)), (x1, _y_at(lower, x1)),
                           (x1, _y_at(upper, x1)), (x0, _y_at(upper, x0)))
                kept.append((corners, coeff))
                for c in corners:
                    verts_on.setdefault(c[0], set()).add(c[1])
        out = []
        for corners, coeff in kept:
            bl, br, tr, tl = corners
            right = sorted(y for y in verts_on.get(br[0], ()) if br[1] < y < tr[1])
            left = sorted((y for y in verts_on.get(bl[0], ()) if bl[1] < y < tl[1]), reverse=True)
            poly = [bl, br] + [(br[0], y) for y in right] + [tr, tl] + [(bl[0], y) for y in left]
            ring = []
            for p in poly:
                if not ring or ring[-1] != p:
                    ring.append(p)
            if ring[0] == ring[-1]:
                ring.pop()
            cx = sum(p[0] for p in ring) / len(ring)
            cy = sum(p[1] for p in ring) / len(ring)
            centre = (cx, cy)
            for j in range(len(ring)):
                a, b = ring[j], ring[(j + 1) % len(ring)]
                if _orient2(centre, a, b) != 0:
                    out.append(((centre, a, b), coeff))
        return out


def _planar_support(simplices, n):
    """Support of a 2-chain: its canonical form with every coefficient replaced by 1."""
    groups = {}
    for s in simplices:
        groups.setdefault(_plane_of(s.vertices), []).append(s.vertices)
    out = []
    for plane in sorted(groups, key=lambda p: p.serialize()):
        tris = []
        for verts in groups[plane]:
            a, b, c = (plane.chart(v) for v in verts)
            if _orient2(a, b, c) < 0:
                b, c = c, b
            tris.append(((a, b, c), 1))
        overlay = PlanarOverlay.from_triangles(tris)
        pieces = []
        for i, row in enumerate(overlay.slabs):
            for lower, upper, coeff in row:
                if coeff:
                    pieces.append((overlay.xs[i], overlay.xs[i + 1], lower, upper))
        out.append((plane.serialize(), _union_signature(pieces)))
    return tuple(out)


def _union_signature(pieces):
    """Boundary of the union of trapezoids, as a canonical segment list (determines the set)."""
    tris = []
    for x0, x1, lower, upper in pieces:
        q = [(x0, _y_at(lower, x0)), (x1, _y_at(lower, x1)), (x1, _y_at(upper, x1)),
             (x0, _y_at(upper, x0))]
        if _orient2(q[0], q[1], q[2]) > 0:
            tris.append(((q[0], q[1], q[2]), 1))
        if _orient2(q[0], q[2], q[3]) > 0:
            tris.append(((q[0], q[2], q[3]), 1))
    return tuple(_segments_2d(tris))


def _in_closed_simplex(verts, p) -> bool:
    """Whether p lies in the closed simplex (exact barycentric test)."""
    if len(verts) == 1:
        return tuple(verts[0]) == tuple(p)
    n = len(p)
    m = len(verts)
    eqs = [([v[i] for v in verts], p[i]) for i in range(n)]
    eqs.append(([Fraction(1)] * m, Fraction(1)))
    rows = [r for r, _ in eqs]
    lam = solve(rows, [b for _, b in eqs], m)
    if lam is None:
        return False
    # affinely independent vertices make the barycentric solution unique
    return all(x >= 0 for x in lam)


# ---------------------------------------------------------------------------
# decomposition into positive and negative parts


def _coplanar(c: PolyhedralChain):
    if c.is_zero():
        return None
    hull = affine_hull([v for s in c.simplices for v in s.vertices])
    if hull.dim != c.degree:
        raise PreconditionError("chain simplices are not contained in one plane of their degree")
    return hull


def pm_decompose(lam: PolyhedralChain):
    """Split a chain in an oriented (k+1)-plane into positive and negative parts."""
    if lam.degree not in (1, 2):
        raise ValueError("pm_decompose works on chains of degree 1 or 2")
    _coplanar(lam)
    plus = [(s.vertices, s.coefficient) for s in lam.simplices if s.coefficient > 0]
    minus = [(s.vertices, -s.coefficient) for s in lam.simplices if s.coefficient < 0]
    overlap = _overlap_measure(plus, minus, lam.degree)
    if overlap != 0:
        raise DegeneracyError("positive and negative parts overlap in full dimension")
    return (PolyhedralChain.build(plus, lam.degree, lam.ambient_dim),
            PolyhedralChain.build(minus, lam.degree, lam.ambient_dim))


def _overlap_measure(plus, minus, degree) -> Fraction:
    if not plus or not minus:
        return Fraction(0)
    if degree == 1:
        line = _line_of(*plus[0][0])
        total = Fraction(0)
        for (a, b), _ in plus:
            ia = sorted(line.chart(v)[0] for v in (a, b))
            for (c, d), _ in minus:
                ib = sorted(line.chart(v)[0] for v in (c, d))
                total += max(Fraction(0), min(ia[1], ib[1]) - max(ia[0], ib[0]))
        return total
    plane = _plane_of(plus[0][0])
    charts = lambda part: [[plane.chart(v) for v in verts] for verts, _ in part]
    bbox = lambda t: (min(p[0] for p in t), max(p[0] for p in t),
                      min(p[1] for p in t), max(p[1] for p in t))
    pa, pb = charts(plus), charts(minus)
    ba, bb = [bbox(t) for t in pa], [bbox(t) for t in pb]
    total = Fraction(0)
    for ta, ra in zip(pa, ba):
        for tb, rb in zip(pb, bb):
            # touching boxes only share boundary, which has no area
            if ra[1] <= rb[0] or rb[1] <= ra[0] or ra[3] <= rb[2] or rb[3] <= ra[2]:
                continue
            total += _polygon_area(_clip(ta, tb))
    return total


def _ccw(poly):
    if len(poly) >= 3 and _polygon_signed_area(poly) < 0:
        return list(reversed(poly))
    return list(poly)


def _clip(subject, clipper):
    """Sutherland-Hodgman clipping of convex polygons (exact)."""
    out = _ccw(subject)
    clip = _ccw(clipper)
    for i in range(len(clip)):
        a, b = clip[i], clip[(i + 1) % len(clip)]
        inp = out
        out = []
        if not inp:
            break
        for j in range(len(inp)):
            p, q = inp[j], inp[(j + 1) % len(inp)]
            pin, qin = _orient2(a, b, p) >= 0, _orient2(a, b, q) >= 0
            if pin:
                out.append(p)
            if pin != qin:
                out.append(_line_intersection(a, b, p, q))
    return out


def _line_intersection(a, b, p, q):
    r = (b[0] - a[0], b[1] - a[1])
    s = (q[0] - p[0], q[1] - p[1])
    den = r[0] * s[1] - r[1] * s[0]
    t = ((p[0] - a[0]) * r[1] - (p[1] - a[1]) * r[0]) / den
    return (p[0] + t * s[0], p[1] + t * s[1])


def _polygon_signed_area(poly) -> Fraction:
    s = Fraction(0)
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        s += a[0] * b[1] - a[1] * b[0]
    return s / 2


def _polygon_area(poly) -> Fraction:
    return abs(_polygon_signed_area(poly)) if len(poly) >= 3 else Fraction(0)


# ---------------------------------------------------------------------------
# bounding chains and linking numbers


def _random_rational(rng: random.Random, lo=-1, hi=1, den=9973) -> Fraction:
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def generic_point_in(plane: AffineSubspace, rng: random.Random, scale: Fraction = Fraction(1)):
    coords = [_random_rational(rng) * scale for _ in range(plane.dim)]
    return plane.point(coords)


def bounding_chain(c: PolyhedralChain, plane: AffineSubspace, base=None,
                   rng: Optional[random.Random] = None) -> PolyhedralChain:
    """The unique (k+1)-chain in the plane with boundary c, by coning from a generic point."""
    if plane.dim != c.degree + 1:
        raise PreconditionError("plane dimension must be one more than the cycle degree")
    if not is_cycle(c):
        raise PreconditionError("chain is not a cycle")
    for v in c.vertices():
        if not plane.contains(v):
            raise PreconditionError("cycle is not contained in the plane")
    rng = rng or random.Random(0)
    if base is None:
        base = generic_point_in(plane, rng, Fraction(max(1, _extent(c))))
    return cone(base, c)


def _extent(c: PolyhedralChain) -> int:
    vs = c.vertices()
    if not vs:
        return 1
    return int(max(abs(x) for v in vs for x in v)) + 1


def simplex_meets(verts, m: AffineSubspace) -> bool:
    """Exact test whether the closed simplex meets the affine subspace."""
    normals, rhs = m.equations()
    k = len(verts)
    eqs = [([dot(a, v) for v in verts], b) for a, b in zip(normals, rhs)]
    eqs.append(([Fraction(1)] * k, Fraction(1)))
    ineqs = []
    for j in range(k):
        row = [Fraction(0)] * k
        row[j] = Fraction(-1)
        ineqs.append((row, Fraction(0), False))
    return feasible(eqs, ineqs, k)


def linking_number(c: PolyhedralChain, m: AffineSubspace, seed: int = 0, retries: int = 20) -> int:
    """Signed intersection count of a cone over c with m (see module docstring for signs)."""
    n = c.ambient_dim
    k = c.degree
    if m.ambient_dim != n or m.codim != k + 1:
        raise PreconditionError(f"need a subspace of codimension {k + 1} in R^{n}")
    if not is_cycle(c):
        raise PreconditionError("chain is not a cycle")
    for s in c.simplices:
        if simplex_meets(s.vertices, m):
            raise PreconditionError("cycle meets the subspace")
    normals, rhs = m.equations()
    mbasis = list(m.direction.basis)
    rng = random.Random(seed)
    scale = Fraction(_extent(c))
    for _ in range(retries):
        q = tuple(_random_rational(rng) * scale for _ in range(n))
        total, generic = 0, True
        for s in c.simplices:
            verts = (q,) + s.vertices
            rows = [[dot(a, v) for v in verts] for a in normals]
            rows.append([Fraction(1)] * len(verts))
            vals = list(rhs) + [Fraction(1)]
            if rank(rows, len(verts)) < len(verts):
                # cone simplex parallel to m: harmless unless it actually meets m
                if simplex_meets(verts, m):
                    generic = False
                    break
                continue
            lam = solve(rows, vals, len(verts))
            if any(x < 0 for x in lam):
                continue
            if any(x == 0 for x in lam):
                generic = False
                break
            sign = det([vsub(v, q) for v in s.vertices] + mbasis)
            if sign == 0:
                generic = False
                break
            total += s.coefficient * (1 if sign > 0 else -1)
        if generic:
            return total
    raise DegeneracyError("no generic cone point found for the linking computation")


# ---------------------------------------------------------------------------
# k-convexity certificates


@dataclass
class ConvexityCertificate:
    plane: AffineSubspace
    cycle: PolyhedralChain
    bounding: PolyhedralChain
    verdict: str  # zero | nonzero-linking | nonzero-oracle | counterexample | unresolved
    witnesses: list = field(default_factory=list)  # (member index, linking number)
    hit_points: list = field(default_factory=list)  # points of L meeting S in the bounding support
    oracle: Optional[str] = None

    def check(self, members) -> bool:
        """Recompute the stored invariants."""
        if boundary(self.bounding) != self.cycle:
            return False
        for idx, value in self.witnesses:
            if linking_number(self.cycle, members[idx]) != value:
                return False
        return True

    def to_json(self) -> dict:
        return {"plane": self.plane.to_json(), "cycle": self.cycle.to_json(),
                "bounding_chain": self.bounding.to_json(), "verdict": self.verdict,
                "witnesses": [{"member": i, "linking": v} for i, v in self.witnesses],
                "oracle": self.oracle}


@dataclass
class CertificationReport:
    plane: AffineSubspace
    k: int
    certificates: list
    perturbations: list = field(default_factory=list)
    members: list = field(default_factory=list)

    @property
    def counterexamples(self) -> list:
        return [c for c in self.certificates if c.verdict == "counterexample"]

    @property
    def nontrivial(self) -> list:
        return [c for c in self.certificates if c.verdict != "zero"]

    @property
    def verdict(self) -> str:
        if self.counterexamples:
            return "counterexample"
        if not self.members and not self.nontrivial:
            return f"vacuously {self.k}-convex on L"
        if any(c.verdict == "unresolved" for c in self.certificates):
            return "unresolved"
        return "certified"

    def to_json(self) -> dict:
        return {"plane": self.plane.to_json(), "k": self.k, "verdict": self.verdict,
                "perturbations": [[fstr(x) for x in p] for p in self.perturbations],
                "members": [m.to_json() for m in self.members],
                "certificates": [c.to_json() for c in self.certificates]}


def _members_in_box(arrangement, box):
    from .torus import LiftedArrangement, lifts_with_members
    if isinstance(arrangement, LiftedArrangement):
        return [lift for _, lift in lifts_with_members(arrangement, box)]
    return list(arrangement)


def _generic_plane(plane, members, k, rng):
    """Translate the plane until it meets every member in a point or not at all."""
    shifts = []
    for _ in range(21):
        bad = False
        for m in members:
            meet = intersect_affine(plane, m)
            if meet is not None and meet.dim > 0:
                bad = True
                break
        if not bad:
            return plane, shifts
        shift = tuple(_random_rational(rng, den=97) / 7 for _ in range(plane.ambient_dim))
        shifts.append(shift)
        plane = plane.translate(shift)
    raise DegeneracyError("plane is not generic with respect to the arrangement after 20 perturbations")


def _chart_box(plane, box):
    """Bounding rectangle, in chart coordinates, of a box's corners projected onto the plane."""
    corners = list(itertools.product(*box))
    charts = []
    for c in corners:
        proj = vadd(plane.basepoint, plane.direction.projection(vsub(qvec(c), plane.basepoint)))
        charts.append(plane.chart(proj))
    d = plane.dim
    return [(min(ch[i] for ch in charts), max(ch[i] for ch in charts)) for i in range(d)]


def _random_cycles(plane, points_chart, k, rng, trials, region, start=0):
    """Seeded random k-cycles in the plane: small boxes around chosen hit points, and random simplices."""
    cycles = []
    pts = list(points_chart)
    for t in range(start, start + trials):
        if k == 0:
            a = tuple(_uniform(rng, *region[0]) for _ in range(1))
            b = tuple(_uniform(rng, *region[0]) for _ in range(1))
            cyc = [((plane.point(b),), 1), ((plane.point(a),), -1)]
            cycles.append(PolyhedralChain.build(cyc, 0, plane.ambient_dim))
            continue
        if pts and t % 2 == 0:
            chosen = rng.sample(pts, min(len(pts), rng.randint(1, 3)))
            items = []
            for p in chosen:
                gap = min([max(abs(p[0] - q[0]), abs(p[1] - q[1])) for q in pts if q != p]
                          + [Fraction(1, 2)])
                h = gap * Fraction(rng.randint(20, 45), 100)
                jx = h * Fraction(rng.randint(-20, 20), 100)
                jy = h * Fraction(rng.randint(-20, 20), 100)
                cx, cy = p[0] + jx, p[1] + jy
                sq = [(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)]
                sign = rng.choice((1, -1))
                for i in range(4):
                    items.append(((plane.point(sq[i]), plane.point(sq[(i + 1) % 4])), sign))
            cycles.append(PolyhedralChain.build(items, 1, plane.ambient_dim))
        else:
            centre = (_uniform(rng, *region[0]), _uniform(rng, *region[1]))
            size = Fraction(rng.choice((1, 3, 10, 30)), 20)
            tri = [(centre[0] + size * _uniform(rng, -1, 1), centre[1] + size * _uniform(rng, -1, 1))
                   for _ in range(3)]
            if _orient2(*tri) == 0:
                tri[2] = (tri[2][0] + Fraction(1, 101), tri[2][1])
            cycles.append(PolyhedralChain.polygon_boundary([plane.point(p) for p in tri]))
    return cycles


def _uniform(rng, lo, hi, den=997):
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


def certify_k_convexity(arrangement, plane: AffineSubspace, k: int, trials: int = 20,
                        seed: int = 0, box=None, cloud=None, dilation: float = 0.02,
                        oracle=None, use_linking: bool = True) -> CertificationReport:
    """Per-cycle certificates that H_k(L minus S) -> H_k(R^n minus S) is injective.

    ``arrangement`` is a LiftedArrangement (enumerated in ``box``) or a list of
    affine subspaces of codimension k+1.  ``cloud`` optionally adds lifted
    sample points (an array or a prebuilt cKDTree), dilated by ``dilation``,
    to the obstacle (k = 0 only).
    ``oracle(cycle, members)`` returns True when the class is zero in the
    complement; it is consulted when no linking witness exists.
    """
    if k not in (0, 1):
        raise ValueError("certificates are implemented for k = 0 and k = 1")
    if plane.dim != k + 1:
        raise PreconditionError("the plane must have dimension k+1")
    rng = random.Random(seed)
    if box is None:
        box = tuple((Fraction(0), Fraction(1)) for _ in range(plane.ambient_dim))
    from .torus import make_box
    box = make_box(box)
    members = _members_in_box(arrangement, box)
    for m in members:
        if m.codim != k + 1:
            raise PreconditionError("arrangement members must have codimension k+1")
    plane, shifts = _generic_plane(plane, members, k, rng)
    hits = []
    for i, m in enumerate(members):
        meet = intersect_affine(plane, m)
        if meet is not None:
            hits.append((i, meet.basepoint))
    region = _chart_box(plane, box)
    if cloud is not None and k != 0:
        raise ValueError("cloud obstacles are supported for k = 0")
    cloud_tree = None
    if cloud is not None:
        from scipy.spatial import cKDTree
        # a prebuilt tree can be shared across many planes
        cloud_tree = cloud if isinstance(cloud, cKDTree) else cKDTree(cloud)
    points_chart = [plane.chart(p) for _, p in hits]
    certs = []
    cycles = []
    attempts = 0
    while len(cycles) < trials and attempts < 50 * trials:
        attempts += 1
        for cyc in _random_cycles(plane, points_chart, k, rng, 1, region, start=len(cycles)):
            if cyc.is_zero():
                continue
            if any(not _in_box(v, box) for s in cyc.simplices for v in s.vertices):
                continue
            # inside the plane a member can only meet the cycle at its hit point
            if any(_in_closed_simplex(s.vertices, p) for s in cyc.simplices for _, p in hits):
                continue
            if cloud_tree is not None and _touches_cloud(cyc, cloud_tree, dilation):
                continue
            cycles.append(cyc)
    for cyc in cycles:
        certs.append(_certify_cycle(cyc, plane, members, hits, rng, cloud_tree, dilation,
                                    oracle, use_linking))
    return CertificationReport(plane, k, certs, shifts, members)


def _in_box(v, box) -> bool:
    return all(lo <= x <= hi for x, (lo, hi) in zip(v, box))


def _touches_cloud(cyc, tree, dilation) -> bool:
    pts = [[float(x) for x in s.vertices[0]] for s in cyc.simplices]
    d, _ = tree.query(pts)
    return bool((d <= dilation).any())


def _segment_meets_cloud(a, b, tree, dilation) -> bool:
    import numpy as np
    a = np.array([float(x) for x in a])
    b = np.array([float(x) for x in b])
    steps = max(2, int(np.linalg.norm(b - a) / (dilation / 4)) + 1)
    ts = np.linspace(0.0, 1.0, steps)
    pts = a[None, :] + ts[:, None] * (b - a)[None, :]
    d, _ = tree.query(pts)
    return bool((d <= dilation).any())


def _certify_cycle(cyc, plane, members, hits, rng, cloud_tree, dilation, oracle, use_linking):
    bounding = bounding_chain(cyc, plane, rng=rng)
    hit_points = [(i, p) for i, p in hits if bounding.value_at(p) != 0]
    through_cloud = False
    if cloud_tree is not None:
        through_cloud = any(_segment_meets_cloud(*s.vertices, cloud_tree, dilation)
                            for s in bounding.simplices)
    nontrivial = bool(hit_points) or through_cloud
    if not nontrivial:
        return ConvexityCertificate(plane, cyc, bounding, "zero")
    witnesses = []
    if use_linking:
        order = [i for i, _ in hit_points] + [i for i in range(len(members))
                                              if i not in {j for j, _ in hit_points}]
        for i in order:
            value = linking_number(cyc, members[i], seed=rng.randint(0, 10 ** 6))
            if value != 0:
                witnesses.append((i, value))
                break
    if witnesses:
        return ConvexityCertificate(plane, cyc, bounding, "nonzero-linking", witnesses,
                                    [p for _, p in hit_points])
    if oracle is None:
        return ConvexityCertificate(plane, cyc, bounding, "unresolved", [],
                                    [p for _, p in hit_points])
    try:
        zero = oracle(cyc, members)
    except PreconditionError as exc:
        return ConvexityCertificate(plane, cyc, bounding, "unresolved", [],
                                    [p for _, p in hit_points], oracle=f"error: {exc}")
    verdict = "counterexample" if zero else "nonzero-oracle"
    return ConvexityCertificate(plane, cyc, bounding, verdict, [], [p for _, p in hit_points],
                                oracle="zero" if zero else "nonzero")


def intersect_convexity(arr_a, arr_b, plane: AffineSubspace, k: int, trials: int = 20,
                        seed: int = 0, box=None, oracle=None) -> dict:
    """Certify each arrangement and their union on the same plane."""
    from .torus import LiftedArrangement
    if isinstance(arr_a, LiftedArrangement) and isinstance(arr_b, LiftedArrangement):
        union = arr_a.union(arr_b)
    else:
        union = list(arr_a) + [m for m in arr_b if m not in list(arr_a)]
    reports = {}
    for name, arr in (("A", arr_a), ("B", arr_b), ("union", union)):
        reports[name] = certify_k_convexity(arr, plane, k, trials, seed, box, oracle=oracle)
    parts_ok = not reports["A"].counterexamples and not reports["B"].counterexamples
    verdict = "certified" if parts_ok and not reports["union"].counterexamples else "counterexample"
    return {"verdict": verdict, "reports": reports}
