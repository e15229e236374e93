"""Acceptance suite: one PASS/FAIL line per criterion, with timings.

Run under pytest (lines are collected and printed in the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction as F

import numpy as np
from scipy.spatial import cKDTree

from coamoeba_lab.chains import (PolyhedralChain, boundary, bounding_chain,
                                 certify_k_convexity, intersect_convexity, linking_number,
                                 pm_decompose, simplex_meets)
from coamoeba_lab.coamoeba import directed_distance, sample_coamoeba, shell
from coamoeba_lab.errors import PreconditionError
from coamoeba_lab.homology import class_is_zero, oracle, rasterize_complement
from coamoeba_lab.laurent import VarietySpec, parse_polynomial
from coamoeba_lab.nonarch import KVarietySpec, na_amoeba, na_coamoeba
from coamoeba_lab.polyhedral import AffineSubspace
from coamoeba_lab.torus import AffineSubgroupCoset, enumerate_in_box

RESULTS = []

ELL = ["x + zeta3*y + zeta3^2*t", "i*x + z - (1+i)"]
GENERIC_LINE = ["x1 + i*x2 + 1", "x1 + zeta3*x3 + 2"]
CLOUD_TOL = 0.02
DILATION = 0.02


def report(number, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = (f"criterion {number}: {'PASS' if ok else 'FAIL'}  "
            f"({elapsed:.2f}s, limit {budget:.0f}s)  {detail}")
    RESULTS.append(line)
    print(line, file=sys.__stdout__, flush=True)
    return ok


def hypersurface(text, n=2):
    return VarietySpec.hypersurface(parse_polynomial(text, n))


def line_spec(texts, n=3):
    return VarietySpec.line([parse_polynomial(s, n) for s in texts])


def box_of(lo, hi, n):
    return tuple((F(lo), F(hi)) for _ in range(n))


def rational(rng, lo, hi, den=97):
    return F(lo) + (F(hi) - F(lo)) * F(rng.randint(1, den - 1), den)


# ---------------------------------------------------------------------------
# 1. nonarchimedean amoeba of the line ell


def test_criterion_1_na_amoeba():
    t0 = time.perf_counter()
    cx = na_amoeba(KVarietySpec.parse(ELL, 3))
    elapsed = time.perf_counter() - t0
    edges = [f for f in cx.faces if f.dim == 1]
    segments = sorted(tuple(sorted(f.vertices)) for f in edges if not f.rays)
    rays = sorted((f.vertices[0], tuple(f.rays[0])) for f in edges if f.rays)
    want_rays = sorted([((0, 0, 0), (0, 0, 1)), ((0, 0, 0), (-1, -1, -1)),
                        ((1, 1, 0), (0, 1, 0)), ((1, 1, 0), (1, 0, 0))])
    ok = (cx.vertices() == [(0, 0, 0), (1, 1, 0)]
          and segments == [((0, 0, 0), (1, 1, 0))] and rays == want_rays)
    show = lambda v: "(" + ",".join(str(x) for x in v) + ")"
    assert report(1, ok, f"vertices={[show(v) for v in cx.vertices()]} segments={len(segments)} "
                         f"rays={[show(v) + '+s' + show(r) for v, r in rays]}", elapsed, 1)


# ---------------------------------------------------------------------------
# 2. nonarchimedean coamoeba: seven strata, closure of the two vertex clouds


def test_criterion_2_na_coamoeba():
    t0 = time.perf_counter()
    co = na_coamoeba(KVarietySpec.parse(ELL, 3))
    dists = co.closure_distances()
    elapsed = time.perf_counter() - t0
    minimal = [s for s in co.strata if s.minimal]
    ok = (len(co.strata) == 7 and len(minimal) == 2 and all(s.dim == 0 for s in minimal)
          and len(dists) == 5 and max(dists.values()) <= CLOUD_TOL)
    worst = max(dists.values()) if dists else float("nan")
    assert report(2, ok, f"strata={len(co.strata)} vertex strata={len(minimal)} "
                         f"max closure distance={worst:.4f} (tol {CLOUD_TOL})", elapsed, 60)


# ---------------------------------------------------------------------------
# 3. shell of 1 + x1 + x2 and the phase-limit property


def test_criterion_3_shell():
    t0 = time.perf_counter()
    spec = hypersurface("1 + x1 + x2")
    sh = shell(spec)
    want = {AffineSubgroupCoset.make([(0, 1)], [F(1, 2), 0]),
            AffineSubgroupCoset.make([(1, 0)], [0, F(1, 2)]),
            AffineSubgroupCoset.make([(1, 1)], [0, F(1, 2)])}
    exact = set(sh.cosets) == want and len(sh.cosets) == 3
    cloud = sample_coamoeba(spec)
    far = cloud.param_log_modulus > 6
    d = sh.distance(cloud.points[far])
    elapsed = time.perf_counter() - t0
    ok = exact and far.sum() > 0 and float(d.max()) <= CLOUD_TOL
    assert report(3, ok, f"cosets={[c.describe() for c in sh.cosets]} far samples={int(far.sum())} "
                         f"max distance={float(d.max()):.2e}", elapsed, 30)


# ---------------------------------------------------------------------------
# 4. 0-convexity of the lifted coamoeba of 1 + x1 + x2


def _lifted_cloud(points, box, margin):
    n = points.shape[1]
    offs = np.stack(np.meshgrid(*[np.arange(int(lo) - 1, int(hi) + 1) for lo, hi in box],
                                indexing="ij"), axis=-1).reshape(-1, n)
    pts = (points[None, :, :] + offs[:, None, :]).reshape(-1, n)
    keep = np.all([(pts[:, i] >= float(lo) - margin) & (pts[:, i] <= float(hi) + margin)
                   for i, (lo, hi) in enumerate(box)], axis=0)
    return pts[keep]


def _segment_hits_cloud(a, b, cloud, radius):
    """Exact point-to-segment distances against the cloud points in the x-window.

    ``cloud`` must be sorted by its first coordinate.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    lo, hi = np.minimum(a, b) - radius, np.maximum(a, b) + radius
    i, j = np.searchsorted(cloud[:, 0], [lo[0], hi[0]])
    near = cloud[i:j]
    near = near[np.all((near >= lo) & (near <= hi), axis=1)]
    if not len(near):
        return False
    d = b - a
    s = np.clip(((near - a) @ d) / (d @ d), 0.0, 1.0)
    gap = np.linalg.norm(near - (a + s[:, None] * d), axis=1)
    return bool((gap <= radius).any())


def _crosses_member(member, a, b):
    (normal,), (value,) = member.equations()
    fa = sum(x * y for x, y in zip(normal, a)) - value
    fb = sum(x * y for x, y in zip(normal, b)) - value
    return fa * fb <= 0


def test_criterion_4_zero_convexity():
    t0 = time.perf_counter()
    spec = hypersurface("1 + x1 + x2")
    box = box_of(0, 2, 2)
    arr = shell(spec).arrangement()
    members = enumerate_in_box(arr, box)
    cloud = _lifted_cloud(sample_coamoeba(spec).points, box, 2 * DILATION)
    cloud = cloud[np.argsort(cloud[:, 0], kind="stable")]
    tree = cKDTree(cloud)
    rng = random.Random(2024)
    same = cross = bad = counter = witnessed = 0
    cloud_only = 0
    for i in range(50):
        base = (rational(rng, 0, 2), rational(rng, 0, 2))
        direction = (rng.randint(-5, 5), rng.randint(1, 5))
        plane = AffineSubspace.make(base, [direction])
        rep = certify_k_convexity(arr, plane, 0, trials=12, seed=i, box=box, cloud=tree,
                                  dilation=DILATION)
        counter += len(rep.counterexamples)
        for cert in rep.certificates:
            b, a = [s.vertices[0] for s in sorted(cert.cycle.simplices,
                                                  key=lambda s: -s.coefficient)]
            by_shell = any(_crosses_member(m, a, b) for m in members)
            by_cloud = _segment_hits_cloud([float(x) for x in a], [float(x) for x in b],
                                           cloud, DILATION)
            if not (by_shell or by_cloud):
                same += 1
                bad += cert.verdict != "zero"
            else:
                cross += 1
                if not by_shell:
                    cloud_only += 1
                if cert.verdict == "nonzero-linking" and cert.witnesses:
                    witnessed += 1
                else:
                    bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and counter == 0 and same and cross
    assert report(4, ok, f"same-component={same} cross-component={cross} witnessed={witnessed} "
                         f"separated only by the dilated cloud={cloud_only} mismatches={bad} "
                         f"counterexamples={counter}", elapsed, 120)


# ---------------------------------------------------------------------------
# 5. 1-convexity for a generic line in (C*)^3


def test_criterion_5_one_convexity():
    t0 = time.perf_counter()
    spec = line_spec(GENERIC_LINE)
    box = box_of(0, 2, 3)
    arr = shell(spec).arrangement()
    decide = oracle(box, 32)
    rng = random.Random(5)
    cycles = nontrivial = linked = confirmed = unresolved = counter = 0
    for i in range(25):
        base = tuple(rational(rng, F(1, 2), F(3, 2)) for _ in range(3))
        while True:
            u = tuple(rng.randint(-3, 3) for _ in range(3))
            v = tuple(rng.randint(-3, 3) for _ in range(3))
            cross = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
            if any(cross):
                break
        plane = AffineSubspace.make(base, [u, v])
        rep = certify_k_convexity(arr, plane, 1, trials=22, seed=100 + i, box=box, oracle=decide)
        cycles += len(rep.certificates)
        for cert in rep.nontrivial:
            nontrivial += 1
            linked += cert.verdict == "nonzero-linking"
            confirmed += cert.verdict == "nonzero-oracle"
            unresolved += cert.verdict == "unresolved"
            counter += cert.verdict == "counterexample"
    elapsed = time.perf_counter() - t0
    ok = cycles >= 500 and counter == 0 and unresolved == 0 and nontrivial > 0
    assert report(5, ok, f"cycles={cycles} nontrivial={nontrivial} linking witnesses={linked} "
                         f"oracle confirmations={confirmed} unresolved={unresolved} "
                         f"counterexamples={counter}", elapsed, 600)


# ---------------------------------------------------------------------------
# 6. linking numbers against the cubical oracle


def _random_line(rng, lo=-F(1, 2), hi=F(1, 2)):
    base = tuple(rational(rng, lo, hi) for _ in range(3))
    while True:
        d = tuple(rng.randint(-3, 3) for _ in range(3))
        if any(d):
            return AffineSubspace.make(base, [d])


def _random_triangle(rng, size=F(3, 2)):
    centre = [rational(rng, F(-1, 2), F(1, 2)) for _ in range(3)]
    pts = [tuple(c + size * rational(rng, -1, 1, 199) for c in centre) for _ in range(3)]
    return PolyhedralChain.polygon_boundary(pts)


def _clearance(cycle, member):
    """Smallest float distance from the polygon edges to the line."""
    p0 = np.array([float(x) for x in member.basepoint])
    d = np.array([float(x) for x in member.direction.basis[0]])
    d /= np.linalg.norm(d)
    best = np.inf
    for s in cycle.simplices:
        a, b = [np.array([float(x) for x in v]) for v in s.vertices]
        ts = np.linspace(0, 1, 200)[:, None]
        pts = a + ts * (b - a) - p0
        perp = pts - np.outer(pts @ d, d)
        best = min(best, float(np.linalg.norm(perp, axis=1).min()))
    return best


def _oracle_nonzero(cycle, members, box, res):
    cx = rasterize_complement(members, box, res)
    return not class_is_zero(cx, cycle)


def test_criterion_6_oracle_agreement():
    t0 = time.perf_counter()
    box = box_of(-2, 2, 3)
    rng = random.Random(6)
    single = single_agree = 0
    while single < 60:
        m = _random_line(rng)
        cyc = _random_triangle(rng)
        if cyc.is_zero() or _clearance(cyc, m) < 0.5:
            continue
        try:
            nonzero = _oracle_nonzero(cyc, [m], box, 32)
        except PreconditionError:
            continue
        single += 1
        single_agree += nonzero == (linking_number(cyc, m) != 0)
    # k = 0: points against planes in R^3
    planes = 0
    while planes < 10:
        normal_line = _random_line(rng)
        basis = AffineSubspace.make(normal_line.basepoint, [(1, 0, 0), (0, 1, F(rng.randint(-2, 2), 3))])
        a = tuple(rational(rng, -1, 1) for _ in range(3))
        b = tuple(rational(rng, -1, 1) for _ in range(3))
        cyc = PolyhedralChain.build([([b], 1), ([a], -1)], 0, 3)
        try:
            link = linking_number(cyc, basis)
            nonzero = _oracle_nonzero(cyc, [basis], box, 32)
        except PreconditionError:
            continue
        planes += 1
        single += 1
        single_agree += nonzero == (link != 0)
    pairs = pair_agree = unstable = 0
    while pairs < 20:
        ms = [_random_line(rng), _random_line(rng)]
        cyc = _random_triangle(rng)
        if cyc.is_zero() or min(_clearance(cyc, m) for m in ms) < 0.5:
            continue
        try:
            v32 = _oracle_nonzero(cyc, ms, box, 32)
            v48 = _oracle_nonzero(cyc, ms, box, 48)
        except PreconditionError:
            continue
        if v32 != v48:
            unstable += 1
            continue
        pairs += 1
        link = [linking_number(cyc, m) for m in ms]
        pair_agree += v32 == any(link)
    elapsed = time.perf_counter() - t0
    ok = single >= 50 and single_agree == single and pairs == 20 and pair_agree == pairs
    assert report(6, ok, f"single-subspace {single_agree}/{single}, two-member {pair_agree}/{pairs} "
                         f"(resolution-unstable skipped: {unstable})", elapsed, 300)


# ---------------------------------------------------------------------------
# 7. chain-calculus invariants


def _random_planar_chain(rng, pieces=3):
    items = []
    for _ in range(rng.randint(1, pieces)):
        tri = [(F(rng.randint(-6, 6), rng.randint(1, 3)), F(rng.randint(-6, 6), rng.randint(1, 3)))
               for _ in range(3)]
        items.append((tri, rng.choice((-2, -1, 1, 2))))
    return PolyhedralChain.build(items, 2, 2)


def test_criterion_7_chain_invariants():
    t0 = time.perf_counter()
    rng = random.Random(7)
    plane = AffineSubspace.make((0, 0), [(1, 0), (0, 1)])
    counts = {"dd": [0, 0], "unique": [0, 0], "pm": [0, 0], "linking": [0, 0]}
    while counts["dd"][0] < 60:
        c = _random_planar_chain(rng)
        counts["dd"][0] += 1
        counts["dd"][1] += boundary(boundary(c)).is_zero()
    while counts["unique"][0] < 60:
        c = _random_planar_chain(rng)
        cyc = boundary(c)
        if cyc.is_zero():
            continue
        a = bounding_chain(cyc, plane, rng=random.Random(rng.random()))
        b = bounding_chain(cyc, plane, rng=random.Random(rng.random()))
        counts["unique"][0] += 1
        counts["unique"][1] += a == b == c
    while counts["pm"][0] < 60:
        c = _random_planar_chain(rng, 4)
        plus, minus = pm_decompose(c)
        pieces = [(list(p), 1) for p in boundary(plus).support() + boundary(minus).support()]
        union = PolyhedralChain.build(pieces, 1, 2).support() if pieces else ()
        counts["pm"][0] += 1
        counts["pm"][1] += boundary(c).support() == union and plus - minus == c
    axis = AffineSubspace.make((0, 0, 0), [(0, 0, 1)])
    base = PolyhedralChain.polygon_boundary([(-1, -1, F(1, 3)), (1, -1, F(1, 3)),
                                             (1, 1, F(1, 3)), (-1, 1, F(1, 3))])
    before = linking_number(base, axis)
    while counts["linking"][0] < 60:
        tris = []
        for _ in range(rng.randint(1, 3)):
            tri = [tuple(F(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(3)) for _ in range(3)]
            if not simplex_meets(tri, axis):
                tris.append((tri, rng.choice((-1, 1))))
        if not tris:
            continue
        moved = base + boundary(PolyhedralChain.build(tris, 2, 3))
        if any(simplex_meets(s.vertices, axis) for s in moved.simplices):
            continue
        counts["linking"][0] += 1
        counts["linking"][1] += linking_number(moved, axis, seed=rng.randint(0, 999)) == before
    elapsed = time.perf_counter() - t0
    ok = all(n >= 50 and good == n for n, good in counts.values())
    detail = " ".join(f"{k}={good}/{n}" for k, (n, good) in counts.items())
    assert report(7, ok, detail, elapsed, 120)


# ---------------------------------------------------------------------------
# 8. cover compatibility for m = 2


def test_criterion_8_cover_pullback():
    t0 = time.perf_counter()
    worst = {}
    for name, spec in (("1+x1+x2", hypersurface("1 + x1 + x2")),
                       ("line", line_spec(GENERIC_LINE))):
        pulled = sample_coamoeba(spec).cover_pullback(2).points
        direct = sample_coamoeba(spec.pullback(2)).points
        worst[name] = max(float(directed_distance(pulled, direct).max()),
                          float(directed_distance(direct, pulled).max()))
    elapsed = time.perf_counter() - t0
    ok = all(v <= CLOUD_TOL for v in worst.values())
    assert report(8, ok, " ".join(f"{k}: hausdorff={v:.4f}" for k, v in worst.items())
                  + f" (tol {CLOUD_TOL})", elapsed, 120)


# ---------------------------------------------------------------------------
# 9. intersection stability


def test_criterion_9_intersections():
    t0 = time.perf_counter()
    rng = random.Random(9)
    box2 = box_of(0, 2, 2)
    a2 = shell(hypersurface("1 + x1 + x2")).arrangement()
    b2 = shell(hypersurface("2 + x1 - 3*x2")).arrangement()
    counter = 0
    checked = 0
    for i in range(10):
        base = (rational(rng, 0, 2), rational(rng, 0, 2))
        plane = AffineSubspace.make(base, [(rng.randint(-4, 4), rng.randint(1, 4))])
        out = intersect_convexity(a2, b2, plane, 0, trials=15, seed=i, box=box2)
        counter += sum(len(r.counterexamples) for r in out["reports"].values())
        checked += sum(len(r.certificates) for r in out["reports"].values())
    box3 = box_of(0, 1, 3)
    a3 = shell(line_spec(GENERIC_LINE)).arrangement()
    b3 = shell(line_spec(["x1 - 2*x2 + 3", "x2 + i*x3 - 1"])).arrangement()
    decide = oracle(box3, 32)
    for i in range(5):
        base = tuple(rational(rng, F(1, 4), F(3, 4)) for _ in range(3))
        plane = AffineSubspace.make(base, [(1, rng.randint(-2, 2), 1), (0, 1, rng.randint(-2, 2))])
        out = intersect_convexity(a3, b3, plane, 1, trials=10, seed=i, box=box3, oracle=decide)
        counter += sum(len(r.counterexamples) for r in out["reports"].values())
        checked += sum(len(r.certificates) for r in out["reports"].values())
    elapsed = time.perf_counter() - t0
    assert report(9, counter == 0 and checked > 0,
                  f"certificates={checked} counterexamples={counter}", elapsed, 180)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
