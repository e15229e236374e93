"""The real torus R^n/Z^n, affine subgroup cosets and their periodic lifts.

Angles are measured in turns.  A coset ``a + T_N`` is stored through the
saturated lattice of integer normals ``U`` (an HNF basis of the integer
vectors orthogonal to N): the coset is ``{theta : U theta = values mod 1}``,
which makes the normal form unique.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .lattice import integer_kernel
from .polyhedral import (AffineSubspace, RationalSubspace, feasible, fstr, nullspace, qvec,
                         solve, to_fraction)


def frac(x):
    """x mod 1 for Fractions, floats and arrays."""
    if isinstance(x, np.ndarray):
        return np.mod(x, 1.0)
    return x % 1


def centered(x):
    """Representative of x mod 1 in [-1/2, 1/2)."""
    return np.mod(np.asarray(x, dtype=float) + 0.5, 1.0) - 0.5


def torus_point(coords) -> tuple:
    """Reduce coordinates mod 1, keeping exact rationals exact."""
    out = []
    for c in coords:
        if isinstance(c, (Fraction, int, str)):
            out.append(to_fraction(c) % 1)
        else:
            v = float(c) % 1.0
            out.append(0.0 if v >= 1.0 else v)
    return tuple(out)


def _clean_float(v: float) -> float:
    v = v % 1.0
    if abs(v - 1.0) < 1e-12 or abs(v) < 1e-12:
        return 0.0
    return v


@dataclass(frozen=True)
class AffineSubgroupCoset:
    direction: RationalSubspace
    normals: tuple  # rows of U, integer tuples
    values: tuple  # U . offset mod 1 (Fractions, or floats for inexact cosets)
    status: str = field(default="exact", compare=False)  # exact | rounded | float

    @classmethod
    def make(cls, direction, offset, status: Optional[str] = None) -> "AffineSubgroupCoset":
        n = len(offset)
        if not isinstance(direction, RationalSubspace):
            direction = RationalSubspace.span(direction, n)
        normals = tuple(integer_kernel(list(direction.basis), n)) if direction.basis \
            else tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        exact = all(isinstance(c, (Fraction, int, str)) for c in offset)
        if exact:
            off = qvec(offset)
            values = tuple(sum((a * x for a, x in zip(u, off)), Fraction(0)) % 1 for u in normals)
        else:
            off = [float(c) for c in offset]
            values = tuple(_clean_float(sum(a * x for a, x in zip(u, off))) for u in normals)
        if status is None:
            status = "exact" if exact else "float"
        return cls(direction, normals, values, status)

    @classmethod
    def from_equations(cls, normals, values, n: int, status: str = "exact") -> "AffineSubgroupCoset":
        """Coset {theta : normals . theta = values mod 1}; normals must span a saturated lattice."""
        normals = [tuple(int(a) for a in u) for u in normals]
        if not normals:
            return cls.make(RationalSubspace.full(n), [Fraction(0)] * n, status)
        point = _particular_solution(normals, values, n)
        direction = RationalSubspace.span(_null(normals, n), n)
        return cls.make(direction, point, status)

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    @property
    def dim(self) -> int:
        return self.direction.dim

    @property
    def is_exact(self) -> bool:
        return self.status != "float"

    def offset(self) -> tuple:
        """Canonical representative: the point of N-perp solving U x = values, taken mod 1."""
        n = self.ambient_dim
        if not self.normals:
            return tuple(Fraction(0) for _ in range(n)) if self.is_exact else (0.0,) * n
        p = _particular_solution(self.normals, self.values, n)
        return torus_point(p)

    def base_lift(self) -> AffineSubspace:
        n = self.ambient_dim
        if not self.is_exact:
            raise ValueError("float cosets have no exact lift")
        if not self.normals:
            return AffineSubspace.make([Fraction(0)] * n, self.direction)
        return AffineSubspace.make(_particular_solution(self.normals, self.values, n),
                                   self.direction)

    def distance(self, points) -> np.ndarray:
        """Torus distance from each point (rows, in turns) to the coset."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if not self.normals:
            return np.zeros(len(pts))
        u = np.array(self.normals, dtype=float)
        v = np.array([float(x) for x in self.values])
        resid = pts @ u.T - v  # shape (m, codim)
        if len(self.normals) == 1:
            return np.abs(centered(resid[:, 0])) / np.linalg.norm(u[0])
        gram_inv = np.linalg.inv(u @ u.T)
        base = np.round(resid)
        best = np.full(len(pts), np.inf)
        k = len(self.normals)
        for shift in itertools.product((-1, 0, 1), repeat=k):
            r = resid - base - np.array(shift, dtype=float)
            d2 = np.einsum("ij,jk,ik->i", r, gram_inv, r)
            best = np.minimum(best, d2)
        return np.sqrt(np.maximum(best, 0.0))

    def contains(self, point, tol: float = 1e-9) -> bool:
        if self.is_exact and all(isinstance(c, (Fraction, int)) for c in point):
            p = qvec(point)
            return all((sum((a * x for a, x in zip(u, p)), Fraction(0)) - v) % 1 == 0
                       for u, v in zip(self.normals, self.values))
        return bool(self.distance([point])[0] <= tol)

    def translate(self, shift) -> "AffineSubgroupCoset":
        exact = self.is_exact and all(isinstance(c, (Fraction, int, str)) for c in shift)
        base = self.offset()
        if exact:
            return AffineSubgroupCoset.make(self.direction, [a + to_fraction(b)
                                                             for a, b in zip(base, shift)],
                                            self.status)
        return AffineSubgroupCoset.make(self.direction, [float(a) + float(b)
                                                         for a, b in zip(base, shift)], "float")

    def pushforward(self, m: int) -> "AffineSubgroupCoset":
        """Image under theta -> m theta."""
        if self.is_exact:
            vals = tuple((m * v) % 1 for v in self.values)
        else:
            vals = tuple(_clean_float(m * v) for v in self.values)
        return AffineSubgroupCoset(self.direction, self.normals, vals, self.status)

    def cover_pullback(self, m: int) -> list:
        """Preimages under theta -> m theta: the m^(codim) cosets U theta = (values + z)/m."""
        k = len(self.normals)
        out = []
        for z in itertools.product(range(m), repeat=k):
            if self.is_exact:
                vals = tuple(((v + zi) / Fraction(m)) % 1 for v, zi in zip(self.values, z))
            else:
                vals = tuple(_clean_float((v + zi) / m) for v, zi in zip(self.values, z))
            out.append(AffineSubgroupCoset(self.direction, self.normals, vals, self.status))
        return sorted(out, key=lambda c: tuple(float(v) for v in c.values))

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Random points on the coset, in [0,1)^n."""
        n = self.ambient_dim
        base = np.array([float(x) for x in self.offset()])
        if self.dim == 0:
            return np.tile(base, (count, 1))
        basis = np.array([[float(x) for x in b] for b in self.direction.basis])
        coeffs = rng.uniform(-3.0, 3.0, size=(count, self.dim))
        return np.mod(base + coeffs @ basis, 1.0)

    def to_json(self) -> dict:
        off = self.offset()
        return {"N_basis": [list(v) for v in self.direction.integer_basis()],
                "offset": [fstr(x) if isinstance(x, Fraction) else float(x) for x in off],
                "status": self.status}

    @classmethod
    def from_json(cls, data) -> "AffineSubgroupCoset":
        off = data["offset"]
        n = len(off)
        offset = [to_fraction(x) if isinstance(x, (str, int)) else float(x) for x in off]
        direction = RationalSubspace.span(data.get("N_basis", []), n)
        return cls.make(direction, offset, data.get("status"))

    def describe(self) -> str:
        """Human-readable equations, e.g. ``theta2 - theta1 = 1/2``."""
        parts = []
        for u, v in zip(self.normals, self.values):
            terms = []
            for j, a in enumerate(u, start=1):
                if a == 0:
                    continue
                coef = "" if abs(a) == 1 else f"{abs(a)}*"
                sign = "-" if a < 0 else "+"
                terms.append((sign, f"{coef}theta{j}"))
            lhs = ("-" if terms[0][0] == "-" else "") + terms[0][1]
            for sign, t in terms[1:]:
                lhs += f" {sign} {t}"
            val = fstr(v) if isinstance(v, Fraction) else f"{v:.12g}"
            parts.append(f"{lhs} = {val}")
        return "; ".join(parts) if parts else "whole torus"


def _null(normals, n):
    return nullspace([qvec(u) for u in normals], n)


def _particular_solution(normals, values, n):
    """Point x in span(normals) with normals . x = values."""
    rows = [qvec(u) for u in normals]
    if all(isinstance(v, Fraction) for v in values):
        gram = [[sum((a * b for a, b in zip(r, s)), Fraction(0)) for s in rows] for r in rows]
        c = solve(gram, list(values), len(rows))
        x = [Fraction(0)] * n
        for ci, r in zip(c, rows):
            for j in range(n):
                x[j] += ci * r[j]
        return tuple(x)
    u = np.array([[float(a) for a in r] for r in rows])
    v = np.array([float(a) for a in values])
    x = u.T @ np.linalg.solve(u @ u.T, v)
    return tuple(float(a) for a in x)


# ---------------------------------------------------------------------------
# periodic lifts


def make_box(spec) -> tuple:
    """Box from [(lo, hi), ...] or a flat [lo1, hi1, lo2, hi2, ...] list; exact rationals."""
    items = list(spec)
    if items and not isinstance(items[0], (list, tuple)):
        items = [items[i:i + 2] for i in range(0, len(items), 2)]
    box = tuple((to_fraction(lo), to_fraction(hi)) for lo, hi in items)
    for lo, hi in box:
        if hi < lo:
            raise ValueError("box corners out of order")
    return box


@dataclass
class LiftedArrangement:
    members: list  # AffineSubgroupCoset, read as their full preimages in R^n
    box: Optional[tuple] = None

    @property
    def ambient_dim(self) -> Optional[int]:
        return self.members[0].ambient_dim if self.members else None

    def lifts(self, box=None) -> list:
        return enumerate_in_box(self, box if box is not None else self.box)

    def cover_pullback(self, m: int) -> "LiftedArrangement":
        members = []
        for c in self.members:
            members.extend(c.cover_pullback(m))
        return LiftedArrangement(members, self.box)

    def union(self, other: "LiftedArrangement") -> "LiftedArrangement":
        seen = list(self.members)
        for c in other.members:
            if c not in seen:
                seen.append(c)
        return LiftedArrangement(seen, self.box or other.box)

    def distance(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if not self.members:
            return np.full(len(pts), np.inf)
        return np.min([c.distance(pts) for c in self.members], axis=0)

    def to_json(self) -> dict:
        out = {"members": [c.to_json() for c in self.members]}
        if self.box is not None:
            out["box"] = [[fstr(lo), fstr(hi)] for lo, hi in self.box]
        return out

    @classmethod
    def from_json(cls, data) -> "LiftedArrangement":
        members = [AffineSubgroupCoset.from_json(c) for c in data.get("members", data.get("cosets", []))]
        box = make_box(data["box"]) if data.get("box") else None
        return cls(members, box)


def _lift_translates(coset: AffineSubgroupCoset, box) -> list:
    n = coset.ambient_dim
    if not coset.is_exact:
        raise ValueError("float cosets cannot be enumerated exactly")
    if not coset.normals:
        return [((), AffineSubspace.make([Fraction(0)] * n, coset.direction))]
    ranges = []
    for u, v in zip(coset.normals, coset.values):
        lo = sum((a * (b[0] if a > 0 else b[1]) for a, b in zip(u, box)), Fraction(0))
        hi = sum((a * (b[1] if a > 0 else b[0]) for a, b in zip(u, box)), Fraction(0))
        ranges.append(range(math.ceil(lo - v), math.floor(hi - v) + 1))
    out = []
    for z in itertools.product(*ranges):
        rhs = [v + zi for v, zi in zip(coset.values, z)]
        eqs = [(qvec(u), r) for u, r in zip(coset.normals, rhs)]
        ineqs = []
        for j, (lo, hi) in enumerate(box):
            e = [Fraction(0)] * n
            e[j] = Fraction(1)
            ineqs.append((tuple(e), hi, False))
            ineqs.append((tuple(-x for x in e), -lo, False))
        if feasible(eqs, ineqs, n):
            point = _particular_solution(coset.normals, rhs, n)
            out.append((tuple(rhs), AffineSubspace.make(point, coset.direction)))
    return out


def enumerate_in_box(arr: LiftedArrangement, box) -> list:
    """Exact list of lifted translates meeting the closed box, member by member."""
    if box is None:
        raise ValueError("a bounded box is required")
    box = make_box(box) if not (box and isinstance(box[0], tuple) and
                                isinstance(box[0][0], Fraction)) else box
    out = []
    for coset in arr.members:
        for _, lift in sorted(_lift_translates(coset, box), key=lambda t: t[0]):
            out.append(lift)
    return out


def lifts_with_members(arr: LiftedArrangement, box) -> list:
    """Pairs (member index, lifted affine subspace) meeting the box."""
    box = make_box(box) if not (box and isinstance(box[0], tuple) and
                                isinstance(box[0][0], Fraction)) else box
    out = []
    for i, coset in enumerate(arr.members):
        for _, lift in sorted(_lift_translates(coset, box), key=lambda t: t[0]):
            out.append((i, lift))
    return out


def point_preimages(point, m: int) -> list:
    """The m^n preimages of a torus point under theta -> m theta."""
    n = len(point)
    exact = all(isinstance(c, (Fraction, int)) for c in point)
    out = []
    for k in itertools.product(range(m), repeat=n):
        if exact:
            out.append(tuple(((to_fraction(c) % 1) + ki) / Fraction(m) for c, ki in zip(point, k)))
        else:
            out.append(tuple(((float(c) % 1.0) + ki) / m for c, ki in zip(point, k)))
    return sorted(out)


def cover_pullback(obj, m: int):
    """Pull back a coset, arrangement, point, or point cloud under theta -> m theta."""
    if m < 1:
        raise ValueError("cover degree must be positive")
    if hasattr(obj, "cover_pullback"):
        return obj.cover_pullback(m)
    if isinstance(obj, np.ndarray):
        return pullback_points(obj, m)
    return point_preimages(obj, m)


def pullback_points(points: np.ndarray, m: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[1]
    shifts = np.array(list(itertools.product(range(m), repeat=n)), dtype=float)
    out = (np.mod(pts, 1.0)[:, None, :] + shifts[None, :, :]) / m
    return out.reshape(-1, n)
