"""Coamoebas as certified point clouds, shells and phase limit sets.

Sampled points come from explicit solvers over a log-polar grid in the free
parameters.  Every kept sample satisfies each generator with scaled residual
``|f(x)| < 1e-9 * max(1, max_term |a x^alpha|)``.  Shells are exact lists of
torus cosets obtained from the initial systems of the maximal cones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import NonBinomialError, PreconditionError, UnsolvableError
from .laurent import ComplexScalar, LaurentPolynomial, VarietySpec
from .lattice import smith
from .polyhedral import RationalSubspace, qvec
from .torus import AffineSubgroupCoset, LiftedArrangement, pullback_points
from .tropical import TropicalFan, tropical_fan

RESIDUAL_TOL = 1e-9
PHASE_ROUND_TOL = 1e-12
PHASE_MAX_DENOMINATOR = 360


# ---------------------------------------------------------------------------
# point clouds


@dataclass
class PointCloud:
    points: np.ndarray  # (m, n) arguments in turns, in [0, 1)
    preimages: Optional[np.ndarray] = None  # (m, n) complex solutions
    log_modulus: Optional[np.ndarray] = None  # max_j |log|x_j|| per sample
    param_log_modulus: Optional[np.ndarray] = None  # |log|s|| of the free parameter(s)
    resolution: float = 1 / 400
    source: str = ""
    rejected: int = 0

    def __len__(self):
        return len(self.points)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def subset(self, mask) -> "PointCloud":
        pick = lambda a: None if a is None else a[mask]
        return PointCloud(self.points[mask], pick(self.preimages), pick(self.log_modulus),
                          pick(self.param_log_modulus), self.resolution, self.source, self.rejected)

    def cover_pullback(self, m: int) -> "PointCloud":
        """All m^n preimages of every point under theta -> m theta."""
        n = self.ambient_dim
        reps = m ** n
        pts = pullback_points(self.points, m)
        rep = (lambda a: None if a is None else np.repeat(a, reps, axis=0))
        return PointCloud(pts, None, rep(self.log_modulus), rep(self.param_log_modulus),
                          self.resolution / m, f"pullback[{m}]({self.source})")

    def lifted(self, offsets) -> np.ndarray:
        """Points of the periodic lift, replicated over integer offsets."""
        offs = np.asarray(list(offsets), dtype=float)
        return (self.points[None, :, :] + offs[:, None, :]).reshape(-1, self.ambient_dim)

    @staticmethod
    def union(clouds) -> "PointCloud":
        clouds = [c for c in clouds if len(c)]
        if not clouds:
            return PointCloud(np.zeros((0, 0)))
        cat = lambda name: (None if any(getattr(c, name) is None for c in clouds)
                            else np.concatenate([getattr(c, name) for c in clouds]))
        return PointCloud(np.concatenate([c.points for c in clouds]), cat("preimages"),
                          cat("log_modulus"), cat("param_log_modulus"),
                          min(c.resolution for c in clouds), "+".join(c.source for c in clouds))

    def to_csv(self, path) -> None:
        np.savetxt(path, self.points, delimiter=",", fmt="%.12g")

    def save(self, path) -> None:
        if str(path).endswith(".csv"):
            self.to_csv(path)
        else:
            np.save(path, self.points)

    @classmethod
    def load(cls, path) -> "PointCloud":
        if str(path).endswith(".npy"):
            pts = np.load(path)
        else:
            pts = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(np.mod(pts, 1.0), source=str(path))


def _wrap(points: np.ndarray) -> np.ndarray:
    p = np.mod(points, 1.0)
    p[p >= 1.0] = 0.0
    return p


def torus_tree(points: np.ndarray) -> cKDTree:
    return cKDTree(_wrap(np.asarray(points, dtype=float)), boxsize=1.0)


def directed_distance(src: np.ndarray, dst: np.ndarray, tree: Optional[cKDTree] = None) -> np.ndarray:
    """Torus distance from every point of src to the nearest point of dst."""
    if len(src) == 0:
        return np.zeros(0)
    if tree is None:
        if len(dst) == 0:
            return np.full(len(src), np.inf)
        tree = torus_tree(dst)
    d, _ = tree.query(_wrap(np.asarray(src, dtype=float)))
    return d


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 and len(b) == 0:
        return 0.0
    return float(max(directed_distance(a, b).max(initial=0.0),
                     directed_distance(b, a).max(initial=0.0)))


# ---------------------------------------------------------------------------
# vectorized evaluation and certification


def eval_with_scale(f: LaurentPolynomial, x: np.ndarray):
    """Values of f on rows of x and the largest term modulus per row."""
    total = np.zeros(len(x), dtype=complex)
    scale = np.zeros(len(x))
    for c, e in f.terms:
        term = np.full(len(x), c.value, dtype=complex)
        for j, k in enumerate(e):
            if k:
                term = term * x[:, j] ** k
        total += term
        scale = np.maximum(scale, np.abs(term))
    return total, scale


def certify(polys, x: np.ndarray) -> np.ndarray:
    """Mask of rows certified near the variety of all polys."""
    with np.errstate(all="ignore"):
        ok = np.all(np.isfinite(x), axis=1) & np.all(x != 0, axis=1)
        for f in polys:
            val, scale = eval_with_scale(f, np.where(ok[:, None], x, 1.0))
            ok &= np.abs(val) < RESIDUAL_TOL * np.maximum(1.0, scale)
    return ok


def arg_turns(x: np.ndarray) -> np.ndarray:
    return _wrap(np.angle(x) / (2 * np.pi))


# ---------------------------------------------------------------------------
# sampling grids


@dataclass
class SamplingGrid:
    radius: float = 8.0
    angular_steps: int = 400
    radial_steps: int = 401
    budget: int = 1_000_000

    def steps(self, k: int):
        """(angular, radial) step counts for k free parameters within the budget."""
        a, r = self.angular_steps, self.radial_steps
        if k <= 1:
            return a, r
        scale = min(1.0, (self.budget / float((a * r) ** k)) ** (1.0 / (2 * k)))
        return max(8, int(a * scale)), max(8, int(r * scale))

    def log_polar(self, angular: int, radial: int, center: complex = 0j,
                  rmin: Optional[float] = None, rmax: Optional[float] = None) -> np.ndarray:
        lo = -self.radius if rmin is None else math.log(rmin)
        hi = self.radius if rmax is None else math.log(rmax)
        radii = np.exp(np.linspace(lo, hi, radial))
        # half-step angular offset keeps samples off the real axis
        angles = (np.arange(angular) + 0.5) / angular
        grid = radii[:, None] * np.exp(2j * np.pi * angles)[None, :]
        return center + grid.ravel()

    def refined(self, factor: int = 2) -> "SamplingGrid":
        return SamplingGrid(self.radius, self.angular_steps * factor,
                            (self.radial_steps - 1) * factor + 1, self.budget * factor ** 2)


def _puncture_grid(grid: SamplingGrid, punctures, angular: int, radial: int) -> np.ndarray:
    """Local log-polar grids around isolated bad parameter values."""
    pts = [p for p in punctures if abs(p) > 0 and np.isfinite(p)]
    out = []
    for p in pts:
        others = [abs(p - q) for q in pts if q is not p and abs(p - q) > 1e-12]
        rmax = min([0.5 * abs(p), 1.0] + [0.5 * d for d in others])
        rmin = math.exp(-grid.radius)
        if rmax <= rmin:
            continue
        out.append(grid.log_polar(angular, radial, center=p, rmin=rmin, rmax=rmax))
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def _nth_roots(w: np.ndarray, d: int) -> np.ndarray:
    """All d-th roots of each entry; shape (len(w), d)."""
    mod = np.abs(w) ** (1.0 / d)
    ang = np.angle(w)
    k = np.arange(d)
    return mod[:, None] * np.exp(1j * (ang[:, None] + 2 * np.pi * k[None, :]) / d)


def _monomials(params: np.ndarray, exps) -> np.ndarray:
    out = np.ones(len(params), dtype=complex)
    for j, k in enumerate(exps):
        if k:
            out = out * params[:, j] ** k
    return out


# ---------------------------------------------------------------------------
# solvers


class _HypersurfaceSolver:
    """Solve f = 0 for a distinguished variable given the others."""

    def __init__(self, f: LaurentPolynomial):
        self.f = f
        n = f.ambient_dim
        for k in range(n):
            groups = {}
            for c, e in f.terms:
                groups.setdefault(e[k], []).append((c, e[:k] + e[k + 1:]))
            keys = sorted(groups)
            if len(keys) == 2:
                self.mode = "root"
            elif len(keys) == 3 and keys[2] - keys[1] == keys[1] - keys[0]:
                self.mode = "quadratic"
            else:
                continue
            self.var = k
            self.keys = keys
            self.groups = [groups[key] for key in keys]
            return
        raise UnsolvableError(f"no variable of {f} can be isolated (needs two exponent levels, "
                              "or three equally spaced ones)")

    @property
    def free(self) -> list:
        return [j for j in range(self.f.ambient_dim) if j != self.var]

    def _group(self, i, params):
        total = np.zeros(len(params), dtype=complex)
        for c, e in self.groups[i]:
            total += c.value * _monomials(params, e)
        return total

    def punctures(self) -> list:
        """Parameter values where a group polynomial vanishes (single free parameter only)."""
        if len(self.free) != 1:
            return []
        out = []
        for i in range(len(self.groups)):
            coeffs = {}
            for c, e in self.groups[i]:
                coeffs[e[0]] = coeffs.get(e[0], 0) + c.value
            lo = min(coeffs)
            poly = np.zeros(max(coeffs) - lo + 1, dtype=complex)
            for k, c in coeffs.items():
                poly[k - lo] += c
            if len(poly) > 1:
                out.extend(np.roots(poly[::-1]).tolist())
        return out

    def solve(self, params: np.ndarray) -> np.ndarray:
        """params: (m, n-1) free coordinates -> (m * roots, n) solutions."""
        with np.errstate(all="ignore"):
            if self.mode == "root":
                a, b = self._group(0, params), self._group(1, params)
                d = self.keys[1] - self.keys[0]
                roots = _nth_roots(-a / b, d)
            else:
                c0, c1, c2 = (self._group(i, params) for i in range(3))
                d = self.keys[1] - self.keys[0]
                disc = np.sqrt(c1 * c1 - 4 * c2 * c0)
                q = -0.5 * (c1 + np.where(np.real(np.conj(c1) * disc) >= 0, disc, -disc))
                y1 = q / c2
                y2 = c0 / q
                roots = np.concatenate([_nth_roots(y1, d), _nth_roots(y2, d)], axis=1)
        r = roots.shape[1]
        n = self.f.ambient_dim
        x = np.empty((len(params) * r, n), dtype=complex)
        rep = np.repeat(params, r, axis=0)
        for col, j in enumerate(self.free):
            x[:, j] = rep[:, col]
        x[:, self.var] = roots.reshape(-1)
        return x


def _linear_degree(polys) -> Optional[int]:
    """m when every exponent is 0 or m * e_k (systems linear in the monomials x_k^m)."""
    m = None
    for p in polys:
        for e in p.exponents:
            nz = [k for k in e if k]
            if not nz:
                continue
            if len(nz) != 1 or nz[0] < 1:
                return None
            if m is None:
                m = nz[0]
            elif nz[0] != m:
                return None
    return m


class _LinearSolver:
    """Solve a system linear in u_k = x_k^m, with one free coordinate x_j."""

    def __init__(self, polys, m: int = 1):
        self.polys = list(polys)
        self.m = m
        n = self.polys[0].ambient_dim
        self.n = n
        mat = np.zeros((len(self.polys), n + 1), dtype=complex)
        for i, p in enumerate(self.polys):
            for c, e in p.terms:
                nz = [k for k, v in enumerate(e) if v]
                mat[i, nz[0] if nz else n] += c.value
        _, s, vh = np.linalg.svd(mat)
        tol = 1e-10 * max(1.0, s[0] if len(s) else 1.0)
        r = int(np.sum(s > tol))
        if r != n - 1:
            raise UnsolvableError(f"linear system has rank {r}, expected {n - 1}")
        kernel = vh[r:].conj().T  # (n+1, 2)
        # affine chart: const column = 1, free column = s
        best = None
        for j in range(n):
            sub = np.array([kernel[j], kernel[n]])
            det = abs(np.linalg.det(sub))
            if best is None or det > best[0] + 1e-12:
                best = (det, j, sub)
        det, j, sub = best
        if det < 1e-12:
            raise UnsolvableError("the line is not parameterized by any coordinate")
        self.free_var = j
        # u = kernel @ inv(sub) @ (s, 1)
        self.coeff = kernel @ np.linalg.inv(sub)  # columns: d u / d s, u at s = 0
        slope, base = self.coeff[:n, 0], self.coeff[:n, 1]
        if any(abs(slope[k]) < 1e-14 and abs(base[k]) < 1e-14 for k in range(n)):
            raise UnsolvableError("the line lies in a coordinate hyperplane")
        self.slope = slope
        self.base = base

    @property
    def free(self) -> list:
        return [self.free_var]

    def punctures(self) -> list:
        """Values of the free parameter s = u_j where another u_k vanishes."""
        out = []
        for k in range(self.n):
            if k != self.free_var and abs(self.slope[k]) > 1e-14:
                p = -self.base[k] / self.slope[k]
                if abs(p) > 1e-12:
                    out.append(complex(p))
        return out

    def solve(self, params: np.ndarray) -> np.ndarray:
        """params: (q, 1) values of x_j (the free coordinate itself)."""
        xj = params[:, 0]
        s = xj ** self.m
        u = self.base[None, :] + s[:, None] * self.slope[None, :]
        m = self.m
        others = [k for k in range(self.n) if k != self.free_var]
        roots = [_nth_roots(u[:, k], m) for k in others]
        combos = list(itertools.product(range(m), repeat=len(others)))
        x = np.empty((len(xj), len(combos), self.n), dtype=complex)
        x[:, :, self.free_var] = xj[:, None]
        for ci, combo in enumerate(combos):
            for k, r, choice in zip(others, roots, combo):
                x[:, ci, k] = r[:, choice]
        return x.reshape(-1, self.n)


def _solver_for(spec: VarietySpec):
    if spec.input_class == "hypersurface":
        return _HypersurfaceSolver(spec.polynomials[0]), "hypersurface"
    m = _linear_degree(spec.polynomials)
    if m is None or spec.declared_codim != spec.ambient_dim - 1:
        raise UnsolvableError("sampling supports hypersurfaces and systems linear in x^m "
                              "(lines and their pullbacks)")
    return _LinearSolver(spec.polynomials, m), f"line[m={m}]"


def _param_grid(solver, grid: SamplingGrid, puncture_scale: int = 4) -> np.ndarray:
    k = len(solver.free)
    ang, rad = grid.steps(k)
    axis = grid.log_polar(ang, rad)
    if k == 1:
        m = getattr(solver, "m", 1)
        if m > 1:
            # punctures are in u = s^m; pull them back to x_j
            punct = []
            for p in solver.punctures():
                punct.extend(_nth_roots(np.array([p]), m)[0].tolist())
        else:
            punct = solver.punctures()
        local = _puncture_grid(grid, punct, ang, max(rad // puncture_scale, 16))
        return np.concatenate([axis, local])[:, None]
    mesh = np.meshgrid(*([axis] * k), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def sample_coamoeba(spec: VarietySpec, grid: Optional[SamplingGrid] = None) -> PointCloud:
    """Certified Arg-image samples of V over a log-polar parameter grid."""
    grid = grid or SamplingGrid()
    solver, tag = _solver_for(spec)
    params = _param_grid(solver, grid)
    x = solver.solve(params)
    ok = certify(spec.polynomials, x)
    rejected = int(len(x) - ok.sum())
    x = x[ok]
    with np.errstate(divide="ignore"):
        logs = np.abs(np.log(np.abs(x)))
    free = solver.free
    return PointCloud(points=arg_turns(x), preimages=x, log_modulus=logs.max(axis=1),
                      param_log_modulus=logs[:, free].max(axis=1),
                      resolution=1.0 / grid.steps(len(free))[0], source=tag, rejected=rejected)


def point_variety_cloud(spec: VarietySpec) -> PointCloud:
    """Arguments of the finitely many points of a zero-dimensional binomial system."""
    cosets = binomial_cosets([p for p in spec.polynomials], spec.ambient_dim)
    pts = np.array([[float(x) for x in c.offset()] for c in cosets])
    return PointCloud(pts, source="points")


# ---------------------------------------------------------------------------
# shells


def round_phase(v: float):
    """Snap to a rational with small denominator when within tolerance."""
    q = Fraction(v).limit_denominator(PHASE_MAX_DENOMINATOR)
    if abs(float(q) - v) < PHASE_ROUND_TOL:
        return q % 1, True
    return v % 1.0, False


def binomial_cosets(system, n: int, expected_direction: Optional[RationalSubspace] = None) -> list:
    """Coamoeba of a binomial system: cosets of T_ker(D) solving D theta = phases mod 1."""
    rows, phases, exact = [], [], True
    for p in system:
        if len(p) != 2:
            raise NonBinomialError(f"{p} is not a binomial")
        (c1, e1), (c2, e2) = p.terms
        rows.append([a - b for a, b in zip(e1, e2)])
        ratio = -(c2 * c1.inverse())
        if ratio.is_exact:
            phases.append(ratio.exact_phase)
        else:
            exact = False
            phases.append(ratio.arg_turns())
    d, u, v = smith(rows)
    r = sum(1 for i in range(min(len(d), n)) if d[i][i] != 0)
    uphi = [sum(u[i][k] * phases[k] for k in range(len(rows))) for i in range(len(rows))]
    # rows beyond the rank are consistency conditions on the phases
    for i in range(r, len(rows)):
        val = uphi[i] % 1 if exact else uphi[i] % 1.0
        if (exact and val != 0) or (not exact and min(val, 1 - val) > 1e-9):
            return []
    direction = RationalSubspace.span([[v[k][j] for k in range(n)] for j in range(r, n)], n) \
        if r < n else RationalSubspace.zero(n)
    if expected_direction is not None and direction != expected_direction:
        raise PreconditionError("binomial initial system does not match its cone")
    out = []
    for t in itertools.product(*[range(d[i][i]) for i in range(r)]):
        eta = []
        for i in range(r):
            if exact:
                eta.append((Fraction(uphi[i]) + t[i]) / d[i][i])
            else:
                eta.append((uphi[i] + t[i]) / d[i][i])
        eta += [0] * (n - r)
        theta = [sum(v[k][j] * eta[j] for j in range(n)) for k in range(n)]
        if exact:
            out.append(AffineSubgroupCoset.make(direction, [Fraction(x) for x in theta], "exact"))
        else:
            out.append(_rounded_coset(direction, [float(x) for x in theta]))
    return _dedupe(out)


def _rounded_coset(direction, theta) -> AffineSubgroupCoset:
    raw = AffineSubgroupCoset.make(direction, [float(x) for x in theta], "float")
    snapped = [round_phase(float(v)) for v in raw.values]
    if all(ok for _, ok in snapped):
        return AffineSubgroupCoset(raw.direction, raw.normals, tuple(q for q, _ in snapped),
                                   "rounded")
    return raw


def _dedupe(cosets) -> list:
    out = []
    for c in cosets:
        if c.is_exact:
            if c not in out:
                out.append(c)
        elif not any(o.normals == c.normals and
                     np.allclose([float(x) for x in o.values], c.values, atol=1e-9) for o in out):
            out.append(c)
    return out


def linear_coset(system, direction: RationalSubspace) -> AffineSubgroupCoset:
    """Coamoeba of an affine-linear initial system whose solutions form one T_N-orbit."""
    n = direction.ambient_dim
    polys = list(system)
    solver = _LinearSolverGeneral(polys, n)
    rng = np.random.default_rng(12345)
    pts = solver.generic_points(rng, 3)
    if pts is None:
        raise NonBinomialError("linear initial system has no solutions in the torus")
    cosets = [AffineSubgroupCoset.make(direction, arg_turns(p[None, :])[0].tolist(), "float")
              for p in pts]
    base = cosets[0]
    for c in cosets[1:]:
        if float(base.distance([[float(x) for x in c.offset()]])[0]) > 1e-8:
            raise NonBinomialError("linear initial system is not a single orbit of its cone's torus")
    return _rounded_coset(direction, [float(x) for x in base.offset()])


class _LinearSolverGeneral:
    """Generic points of the solution set of an affine-linear system in C^n."""

    def __init__(self, polys, n):
        mat = np.zeros((len(polys), n + 1), dtype=complex)
        for i, p in enumerate(polys):
            for c, e in p.terms:
                nz = [k for k, v in enumerate(e) if v]
                mat[i, nz[0] if nz else n] += c.value
        self.mat = mat
        self.n = n

    def generic_points(self, rng, count):
        n = self.n
        a, b = self.mat[:, :n], -self.mat[:, n]
        if len(a) == 0:
            return rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
        _, s, vh = np.linalg.svd(a)
        tol = 1e-10 * max(1.0, s[0])
        r = int(np.sum(s > tol))
        x0, *_ = np.linalg.lstsq(a, b, rcond=None)
        if np.linalg.norm(a @ x0 - b) > 1e-8 * max(1.0, np.linalg.norm(b)):
            return None
        null = vh[r:].conj().T
        out = []
        for _ in range(count):
            c = rng.normal(size=null.shape[1]) + 1j * rng.normal(size=null.shape[1])
            out.append(x0 + null @ c)
        pts = np.array(out)
        if np.any(np.min(np.abs(pts), axis=1) < 1e-12):
            return None
        return pts


@dataclass
class ShellCoset:
    coset: AffineSubgroupCoset
    cone_index: int
    cone_rays: tuple
    initial_system: tuple  # strings

    def to_json(self) -> dict:
        return dict(self.coset.to_json(), cone=[list(r) for r in self.cone_rays],
                    initial_system=list(self.initial_system))


@dataclass
class Shell:
    members: list  # ShellCoset
    ambient_dim: int = 0

    @property
    def cosets(self) -> list:
        return [m.coset for m in self.members]

    def arrangement(self, box=None) -> LiftedArrangement:
        return LiftedArrangement(list(self.cosets), box)

    def distance(self, points) -> np.ndarray:
        return self.arrangement().distance(points)

    def sample(self, per_coset: int, rng) -> np.ndarray:
        if not self.members:
            return np.zeros((0, self.ambient_dim))
        return np.concatenate([c.sample(per_coset, rng) for c in self.cosets])

    def to_json(self) -> dict:
        return {"n": self.ambient_dim, "cosets": [m.to_json() for m in self.members]}


def cone_cosets(system, direction: RationalSubspace) -> list:
    """Exact coamoeba of a cone's initial system, as a list of T_N cosets."""
    n = direction.ambient_dim
    system = [p for p in system]
    if all(len(p) == 2 for p in system):
        return binomial_cosets(system, n, direction)
    if all(p.is_affine_linear() for p in system):
        return [linear_coset(system, direction)]
    raise NonBinomialError("initial system is neither binomial nor linear: "
                           + "; ".join(str(p) for p in system))


def shell(spec: VarietySpec, fan: Optional[TropicalFan] = None) -> Shell:
    fan = fan or tropical_fan(spec)
    members = []
    for i in fan.maximal_indices():
        cone = fan.fan.cones[i]
        system = fan.initial_bases[i]
        for c in cone_cosets(system, cone.span):
            if c.dim != spec.dim:
                raise PreconditionError(f"shell coset of dimension {c.dim}, expected {spec.dim}")
            members.append(ShellCoset(c, i, cone.rays, tuple(str(p) for p in system)))
    return Shell(members, spec.ambient_dim)


# ---------------------------------------------------------------------------
# phase limit sets


@dataclass
class Stratum:
    cone_index: int
    cone_rays: tuple
    span: RationalSubspace
    maximal: bool
    initial_system: tuple  # LaurentPolynomial
    cosets: list = field(default_factory=list)
    cloud: Optional[PointCloud] = None

    @property
    def kind(self) -> str:
        return "exact" if self.cloud is None else "sampled"

    def to_json(self) -> dict:
        out = {"cone": [list(r) for r in self.cone_rays], "maximal": self.maximal,
               "kind": self.kind, "initial_system": [str(p) for p in self.initial_system]}
        if self.cloud is None:
            out["cosets"] = [c.to_json() for c in self.cosets]
        else:
            out["samples"] = len(self.cloud)
        return out


@dataclass
class PhaseLimitSet:
    strata: list

    def to_json(self) -> dict:
        return {"strata": [s.to_json() for s in self.strata]}


def initial_spec(system, n: int) -> VarietySpec:
    polys = tuple(system)
    if len(polys) == 1:
        return VarietySpec(polys, 1, "hypersurface")
    return VarietySpec(polys, n - 1, "complete_intersection")


def phase_limit_set(spec: VarietySpec, grid: Optional[SamplingGrid] = None,
                    fan: Optional[TropicalFan] = None) -> PhaseLimitSet:
    fan = fan or tropical_fan(spec)
    maximal = set(fan.maximal_indices())
    strata = []
    for i, cone in enumerate(fan.fan.cones):
        if cone.dim == 0:
            continue
        system = fan.initial_bases[i]
        st = Stratum(i, cone.rays, cone.span, i in maximal, system)
        if i in maximal:
            st.cosets = cone_cosets(system, cone.span)
        else:
            st.cloud = sample_coamoeba(initial_spec(system, spec.ambient_dim), grid)
        strata.append(st)
    return PhaseLimitSet(strata)


def translate_samples(cloud: PointCloud, shifts: np.ndarray) -> np.ndarray:
    """Multiply preimages by exp(2 pi i shift) for each shift; returns stacked complex points."""
    phases = np.exp(2j * np.pi * np.asarray(shifts, dtype=float))
    return (cloud.preimages[None, :, :] * phases[:, None, :]).reshape(-1, cloud.ambient_dim)


def lifted(obj, offsets=None, box=None):
    """Periodic lift of a shell (as an arrangement) or of a point cloud (replicated points)."""
    if isinstance(obj, Shell):
        return obj.arrangement(box)
    if isinstance(obj, PointCloud):
        if offsets is None:
            offsets = list(itertools.product((0, 1), repeat=obj.ambient_dim))
        return obj.lifted(offsets)
    if isinstance(obj, LiftedArrangement):
        return obj
    raise TypeError(f"cannot lift {type(obj).__name__}")
