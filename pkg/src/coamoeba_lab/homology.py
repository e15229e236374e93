"""Cubical homology of rasterized complements, used as an independent oracle.

The working box is cut into ``res`` cells per axis.  Cells live on the
doubled grid of shape ``(2*res+1,)*n``; a cell's dimension is its number of
odd coordinates and its boundary is ``sum_j (-1)^j (upper_j - lower_j)``
over its odd axes in increasing order.

A top cube is kept when its centre is farther than ``dilation + half
diagonal`` from the obstacle, so every kept closed cube stays more than
``dilation`` away.  The complex is the closure of the kept cubes.  Homology
is computed after free-face collapses (compiled kernel when available),
an algebraic reduction on unit pivots, and Smith normal form on what is left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from . import _kernels
from .errors import EmptyComplementError, PreconditionError, SnappingError
from .lattice import in_integer_image, smith_diagonal
from .polyhedral import AffineSubspace, qvec


@dataclass
class CubicalGrid:
    box: tuple  # ((lo, hi), ...) as Fractions
    res: int

    def __post_init__(self):
        self.box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.box)
        if self.res < 1:
            raise ValueError("resolution must be positive")

    @property
    def n(self) -> int:
        return len(self.box)

    @property
    def shape(self) -> tuple:
        return (2 * self.res + 1,) * self.n

    @property
    def cell_sizes(self) -> np.ndarray:
        return np.array([float(hi - lo) / self.res for lo, hi in self.box])

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.cell_sizes))

    def doubled_to_point(self, coords) -> np.ndarray:
        lo = np.array([float(b[0]) for b in self.box])
        return lo + np.asarray(coords, dtype=float) * self.cell_sizes / 2

    def top_centres(self) -> np.ndarray:
        axes = [np.arange(1, 2 * self.res, 2) for _ in range(self.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        coords = np.stack([m.ravel() for m in mesh], axis=1)
        return self.doubled_to_point(coords)

    def snap_vertex(self, point) -> tuple:
        """Doubled-grid coordinates of the nearest grid vertex; exact ties are refused."""
        out = []
        for x, (lo, hi) in zip(qvec(point), self.box):
            t = (x - lo) * self.res / (hi - lo)
            fl = math.floor(t)
            frac = t - fl
            if frac == Fraction(1, 2):
                raise SnappingError(f"point {tuple(map(float, point))} is equidistant from grid vertices")
            v = fl + 1 if frac > Fraction(1, 2) else fl
            if v < 0 or v > self.res:
                raise SnappingError("point lies outside the working box")
            out.append(2 * int(v))
        return tuple(out)


def _cell_dim(coords) -> int:
    return sum(c & 1 for c in coords)


class CubicalComplex:
    """A subcomplex of the doubled grid, stored as a flat presence mask."""

    def __init__(self, grid: CubicalGrid, present: np.ndarray):
        self.grid = grid
        self.present = np.ascontiguousarray(present.reshape(-1), dtype=np.uint8)

    @classmethod
    def from_top_cubes(cls, grid: CubicalGrid, keep: np.ndarray) -> "CubicalComplex":
        shape = grid.shape
        full = np.zeros(shape, dtype=bool)
        full[(slice(1, None, 2),) * grid.n] = keep.reshape((grid.res,) * grid.n)
        for ax in range(grid.n):
            lo = [slice(None)] * grid.n
            hi = [slice(None)] * grid.n
            lo[ax], hi[ax] = slice(0, -1), slice(1, None)
            grown = full.copy()
            grown[tuple(lo)] |= full[tuple(hi)]
            grown[tuple(hi)] |= full[tuple(lo)]
            full = grown
        return cls(grid, full)

    @property
    def shape(self) -> tuple:
        return self.grid.shape

    def strides(self) -> list:
        st = [1] * self.grid.n
        for ax in range(self.grid.n - 2, -1, -1):
            st[ax] = st[ax + 1] * self.shape[ax + 1]
        return st

    def cells(self, dim: Optional[int] = None) -> np.ndarray:
        idx = np.flatnonzero(self.present)
        if dim is None:
            return idx
        coords = np.stack(np.unravel_index(idx, self.shape), axis=1)
        return idx[(coords & 1).sum(axis=1) == dim]

    def count(self, dim: int) -> int:
        return len(self.cells(dim))

    def faces(self, idx: int) -> list:
        """(face index, sign) pairs of a cell's boundary."""
        coords = np.unravel_index(idx, self.shape)
        st = self.strides()
        out = []
        j = 0
        for ax in range(self.grid.n):
            if coords[ax] & 1:
                e = 1 if j % 2 == 0 else -1
                out.append((idx + st[ax], e))
                out.append((idx - st[ax], -e))
                j += 1
        return out

    def boundary_matrix(self, dim: int):
        """Sparse integer boundary from dim-cells to (dim-1)-cells, with the index lists."""
        cols = self.cells(dim)
        rows = self.cells(dim - 1)
        pos = {int(r): i for i, r in enumerate(rows)}
        data, ri, ci = [], [], []
        for j, c in enumerate(cols):
            for f, e in self.faces(int(c)):
                if f in pos:
                    ri.append(pos[f])
                    ci.append(j)
                    data.append(e)
        mat = sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), len(cols)), dtype=np.int64)
        return mat, rows, cols

    def copy(self) -> "CubicalComplex":
        return CubicalComplex(self.grid, self.present.copy())


# ---------------------------------------------------------------------------
# rasterization


def _subspace_distances(points: np.ndarray, sub: AffineSubspace) -> np.ndarray:
    base = np.array([float(x) for x in sub.basepoint])
    diff = points - base
    if sub.dim:
        basis = np.array([[float(x) for x in v] for v in sub.direction.basis]).T
        q, _ = np.linalg.qr(basis)
        diff = diff - (diff @ q) @ q.T
    return np.linalg.norm(diff, axis=1)


def rasterize_complement(obstacles, box, res: int, dilation: Optional[float] = None,
                         cloud: Optional[np.ndarray] = None,
                         cloud_dilation: Optional[float] = None) -> CubicalComplex:
    """Cubical complex of the box minus the dilated obstacles.

    ``obstacles`` are affine subspaces; ``cloud`` is an optional array of points.
    The dilation defaults to one cell diagonal and may not be smaller.
    """
    grid = CubicalGrid(box, res)
    diag = grid.diagonal
    if dilation is None:
        dilation = diag
    if dilation < diag * (1 - 1e-12):
        raise PreconditionError("dilation must be at least one cell diagonal")
    centres = grid.top_centres()
    reach = dilation + diag / 2
    keep = np.ones(len(centres), dtype=bool)
    for sub in obstacles:
        keep &= _subspace_distances(centres, sub) > reach
    if cloud is not None and len(cloud):
        tree = cKDTree(np.asarray(cloud, dtype=float))
        r = (cloud_dilation if cloud_dilation is not None else dilation) + diag / 2
        d, _ = tree.query(centres, distance_upper_bound=r)
        keep &= ~np.isfinite(d)
    if not keep.any():
        raise EmptyComplementError("the dilated obstacle covers the whole box")
    return CubicalComplex.from_top_cubes(grid, keep)


# ---------------------------------------------------------------------------
# reduction


class _SparseComplex:
    """Small chain complex as dictionaries, for algebraic reduction of a remainder."""

    def __init__(self, cx: CubicalComplex):
        self.dim = {}
        self.bd = {}
        self.cob = {}
        idx = cx.cells()
        coords = np.stack(np.unravel_index(idx, cx.shape), axis=1) if len(idx) else np.zeros((0, cx.grid.n), int)
        dims = (coords & 1).sum(axis=1)
        live = set(int(i) for i in idx)
        for i, d in zip(idx, dims):
            i = int(i)
            self.dim[i] = int(d)
            self.bd[i] = {}
            self.cob.setdefault(i, {})
        for i in self.dim:
            if self.dim[i] == 0:
                continue
            for f, e in cx.faces(i):
                if f in live:
                    self.bd[i][f] = e
                    self.cob.setdefault(f, {})[i] = e

    def remove_pair(self, tau, sigma, cycle, cycle_dim):
        inc = self.bd[tau][sigma]
        if cycle is not None:
            if cycle_dim == self.dim[sigma] and cycle.get(sigma, 0):
                a = cycle[sigma]
                for f, e in self.bd[tau].items():
                    v = cycle.get(f, 0) - a * inc * e
                    if v:
                        cycle[f] = v
                    else:
                        cycle.pop(f, None)
            if cycle_dim == self.dim[tau]:
                cycle.pop(tau, None)
        for other, coef in list(self.cob[sigma].items()):
            if other == tau:
                continue
            factor = coef * inc
            for f, e in self.bd[tau].items():
                v = self.bd[other].get(f, 0) - factor * e
                if v:
                    self.bd[other][f] = v
                    self.cob[f][other] = v
                else:
                    self.bd[other].pop(f, None)
                    self.cob[f].pop(other, None)
        for rho in list(self.cob[tau]):
            self.bd[rho].pop(tau, None)
        for f in list(self.bd[tau]):
            self.cob[f].pop(tau, None)
        for f in list(self.bd[sigma]):
            self.cob[f].pop(sigma, None)
        for cell in (tau, sigma):
            del self.bd[cell]
            del self.cob[cell]
            del self.dim[cell]

    def reduce(self, cycle=None, cycle_dim=-1):
        changed = True
        while changed:
            changed = False
            for tau in list(self.bd):
                if tau not in self.bd:
                    continue
                for sigma, e in self.bd[tau].items():
                    if abs(e) == 1:
                        self.remove_pair(tau, sigma, cycle, cycle_dim)
                        changed = True
                        break

    def matrix(self, dim):
        cols = sorted(c for c, d in self.dim.items() if d == dim)
        rows = sorted(c for c, d in self.dim.items() if d == dim - 1)
        pos = {r: i for i, r in enumerate(rows)}
        mat = [[0] * len(cols) for _ in rows]
        for j, c in enumerate(cols):
            for f, e in self.bd[c].items():
                mat[pos[f]][j] = e
        return mat, rows, cols


def collapse(cx: CubicalComplex, cycle: Optional[np.ndarray] = None, cycle_dim: int = -1):
    """Free-face collapse in place; returns (collapses, pushed cycle)."""
    if cycle is None:
        cycle = np.zeros(len(cx.present), dtype=np.int64)
    count = _kernels.collapse(cx.present, cx.shape, cycle, cycle_dim)
    return count, cycle


def betti_numbers(cx: CubicalComplex, reduced: bool = False) -> list:
    """Betti numbers b_0..b_n of the complex (integer ranks; torsion ignored)."""
    work = cx.copy()
    collapse(work)
    small = _SparseComplex(work)
    small.reduce()
    n = cx.grid.n
    counts = [sum(1 for d in small.dim.values() if d == k) for k in range(n + 1)]
    ranks = [0] * (n + 2)
    for k in range(1, n + 1):
        mat, rows, cols = small.matrix(k)
        if rows and cols:
            ranks[k] = sum(1 for d in smith_diagonal(mat) if d != 0)
    betti = [counts[k] - ranks[k] - ranks[k + 1] for k in range(n + 1)]
    if reduced:
        betti[0] -= 1
    return betti


# ---------------------------------------------------------------------------
# cycles on the grid


def _staircase(u, v):
    """Lattice path between doubled-grid vertices, stepping the axis that lags most."""
    u = list(u)
    steps = [(b - a) // 2 for a, b in zip(u, v)]
    done = [0] * len(u)
    path = []
    total = [abs(s) for s in steps]
    while done != total:
        best, best_key = None, None
        for ax, t in enumerate(total):
            if done[ax] < t:
                key = Fraction(2 * done[ax] + 1, 2 * t)
                if best_key is None or key < best_key:
                    best, best_key = ax, key
        sgn = 1 if steps[best] > 0 else -1
        edge = list(u)
        edge[best] += sgn
        path.append((tuple(edge), sgn))
        u[best] += 2 * sgn
        done[best] += 1
    return path


def snap_chain(cx: CubicalComplex, chain) -> np.ndarray:
    """Dense cycle vector for a polyhedral 0- or 1-chain snapped onto the complex."""
    vec = np.zeros(len(cx.present), dtype=np.int64)
    shape = cx.shape
    if chain.degree == 0:
        for s in chain.simplices:
            g = cx.grid.snap_vertex(s.vertices[0])
            vec[np.ravel_multi_index(g, shape)] += s.coefficient
    elif chain.degree == 1:
        for s in chain.simplices:
            a = cx.grid.snap_vertex(s.vertices[0])
            b = cx.grid.snap_vertex(s.vertices[1])
            for edge, sgn in _staircase(a, b):
                vec[np.ravel_multi_index(edge, shape)] += sgn * s.coefficient
    else:
        raise ValueError("only 0- and 1-cycles can be snapped")
    support = np.flatnonzero(vec)
    if len(support) and not cx.present[support].all():
        raise SnappingError("the snapped cycle leaves the complement complex")
    return vec


def class_is_zero(cx: CubicalComplex, chain) -> bool:
    """Whether the snapped cycle bounds in the complex (reduced homology for 0-cycles)."""
    if chain.degree == 0 and chain.augmentation() != 0:
        raise PreconditionError("0-cycles must have coefficient sum zero")
    vec = snap_chain(cx, chain)
    return cycle_vector_is_zero(cx, vec, chain.degree)


def cycle_vector_is_zero(cx: CubicalComplex, vec: np.ndarray, k: int) -> bool:
    work = cx.copy()
    vec = vec.copy()
    collapse(work, vec, k)
    support = np.flatnonzero(vec)
    if not len(support):
        return True
    if not work.present[support].all():
        raise RuntimeError("pushed cycle left the collapsed complex")
    small = _SparseComplex(work)
    cyc = {int(i): int(vec[i]) for i in support}
    small.reduce(cyc, k)
    if not cyc:
        return True
    mat, rows, cols = small.matrix(k + 1)
    pos = {r: i for i, r in enumerate(rows)}
    target = [0] * len(rows)
    for cell, a in cyc.items():
        target[pos[cell]] = a
    if not cols:
        return not any(target)
    return in_integer_image(mat, target)


def boundary_squared_is_zero(cx: CubicalComplex) -> bool:
    for dim in range(2, cx.grid.n + 1):
        d1, _, _ = cx.boundary_matrix(dim - 1)
        d2, _, _ = cx.boundary_matrix(dim)
        if d1.shape[1] and d2.shape[1] and (d1 @ d2).count_nonzero():
            return False
    return True


def oracle(box, res: int, dilation: Optional[float] = None, cloud=None):
    """Callable ``(cycle, members) -> bool`` deciding whether the cycle bounds in the complement."""

    def decide(cycle, members):
        cx = rasterize_complement(members, box, res, dilation, cloud)
        return class_is_zero(cx, cycle)

    return decide
