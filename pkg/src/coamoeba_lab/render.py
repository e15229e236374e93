"""Static figures: coset arrangements and sample clouds over fundamental domains.

SVG output draws every lifted coset meeting the box ``[0, domain]^n`` as one
element with ``class="coset"`` (segments for lines, polygons for planes), so
figures can be checked structurally.  PNG output goes through matplotlib.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .errors import PreconditionError
from .polyhedral import AffineSubspace
from .torus import LiftedArrangement, enumerate_in_box

SIZE = 640
MARGIN = 24


@dataclass
class Layer:
    kind: str  # "cloud" or "cosets"
    data: object  # (m, n) array in turns, or a LiftedArrangement
    color: str = "#1f4e99"
    opacity: float = 0.6


@dataclass
class RenderSpec:
    projection: str = "coords-2d"  # or "coords-3d-orthographic"
    domain: int = 1
    azimuth: float = 35.0
    elevation: float = 25.0
    layers: list = field(default_factory=list)
    projection_matrix: Optional[np.ndarray] = None
    max_cloud_points: int = 20000

    def __post_init__(self):
        if self.domain < 1:
            raise ValueError("domain must be at least 1")
        if self.projection not in ("coords-2d", "coords-3d-orthographic"):
            raise ValueError(f"unknown projection {self.projection!r}")


def _rotation(azimuth: float, elevation: float) -> np.ndarray:
    a, e = math.radians(azimuth), math.radians(elevation)
    rz = np.array([[math.cos(a), -math.sin(a), 0], [math.sin(a), math.cos(a), 0], [0, 0, 1]])
    rx = np.array([[1, 0, 0], [0, math.cos(e), -math.sin(e)], [0, math.sin(e), math.cos(e)]])
    return (rx @ rz)[[0, 2], :]


def projector(spec: RenderSpec, n: int) -> np.ndarray:
    """Linear map from R^n to the drawing plane."""
    if spec.projection_matrix is not None:
        mat = np.asarray(spec.projection_matrix, dtype=float)
        if mat.shape != (2, n):
            raise PreconditionError(f"projection matrix must have shape (2, {n})")
        return mat
    if n > 3:
        raise PreconditionError("dimension above 3 needs a projection matrix")
    if spec.projection == "coords-2d" or n <= 2:
        mat = np.zeros((2, n))
        for i in range(min(n, 2)):
            mat[i, i] = 1.0
        return mat
    return _rotation(spec.azimuth, spec.elevation)


def clip_line(point, direction, box):
    """Liang-Barsky clip of the line point + s*direction to a closed box; None if disjoint."""
    lo_s, hi_s = -math.inf, math.inf
    for p, d, (lo, hi) in zip(point, direction, box):
        if d == 0:
            if p < lo or p > hi:
                return None
            continue
        s1, s2 = (lo - p) / d, (hi - p) / d
        if s1 > s2:
            s1, s2 = s2, s1
        lo_s, hi_s = max(lo_s, s1), min(hi_s, s2)
        if lo_s > hi_s:
            return None
    a = tuple(p + lo_s * d for p, d in zip(point, direction))
    b = tuple(p + hi_s * d for p, d in zip(point, direction))
    return a, b


def clip_plane(plane: AffineSubspace, box):
    """Vertices of a 2-plane's intersection with a 3-box, in cyclic order."""
    normals, rhs = plane.equations()
    a, c = [float(x) for x in normals[0]], float(rhs[0])
    corners = [tuple(float(box[i][(k >> i) & 1]) for i in range(3)) for k in range(8)]
    pts = []
    for i in range(8):
        for j in range(i + 1, 8):
            if bin(i ^ j).count("1") != 1:
                continue
            p, q = np.array(corners[i]), np.array(corners[j])
            fp, fq = np.dot(a, p) - c, np.dot(a, q) - c
            if fp == 0:
                pts.append(tuple(p))
            if fq == 0:
                pts.append(tuple(q))
            if fp * fq < 0:
                pts.append(tuple(p + (q - p) * fp / (fp - fq)))
    uniq = []
    for p in pts:
        if not any(np.allclose(p, u, atol=1e-12) for u in uniq):
            uniq.append(p)
    if len(uniq) < 3:
        return uniq
    arr = np.array(uniq)
    centre = arr.mean(axis=0)
    b = [np.array([float(x) for x in v]) for v in plane.direction.basis]
    ang = np.arctan2((arr - centre) @ b[1], (arr - centre) @ b[0])
    return [tuple(x) for x in arr[np.argsort(ang)]]


def coset_shapes(arr: LiftedArrangement, domain: int, n: int):
    """One drawable shape (list of R^n points) per lift meeting [0, domain]^n."""
    box = tuple((Fraction(0), Fraction(domain)) for _ in range(n))
    fbox = [(0.0, float(domain))] * n
    shapes = []
    for lift in enumerate_in_box(arr, box):
        if lift.dim == 0:
            shapes.append([tuple(float(x) for x in lift.basepoint)])
        elif lift.dim == 1:
            p = [float(x) for x in lift.basepoint]
            d = [float(x) for x in lift.direction.basis[0]]
            seg = clip_line(p, d, fbox)
            shapes.append(list(seg) if seg else [tuple(p)])
        elif lift.dim == 2 and n == 3:
            shapes.append(clip_plane(lift, box))
        else:
            raise PreconditionError("cosets of this dimension are not drawable")
    return shapes


def _frame(spec: RenderSpec, n: int):
    """Projected box corners, used to fix the viewport."""
    proj = projector(spec, n)
    corners = np.array([[spec.domain * ((k >> i) & 1) for i in range(n)] for k in range(2 ** n)],
                       dtype=float)
    return proj, corners @ proj.T


def _ambient(spec: RenderSpec) -> int:
    for layer in spec.layers:
        if layer.kind == "cloud" and len(layer.data):
            return np.asarray(layer.data).shape[1]
        if layer.kind == "cosets" and layer.data.members:
            return layer.data.ambient_dim
    return 2


def _replicate(points: np.ndarray, domain: int) -> np.ndarray:
    n = points.shape[1]
    grids = np.stack(np.meshgrid(*[np.arange(domain)] * n, indexing="ij"), axis=-1).reshape(-1, n)
    return (np.mod(points, 1.0)[None, :, :] + grids[:, None, :]).reshape(-1, n)


def render_svg(spec: RenderSpec, path=None) -> dict:
    """Write (or return) the SVG; returns text and per-layer element counts."""
    n = _ambient(spec)
    proj, frame = _frame(spec, n)
    lo, hi = frame.min(axis=0), frame.max(axis=0)
    scale = (SIZE - 2 * MARGIN) / max(float((hi - lo).max()), 1e-9)

    def px(q):
        q = np.atleast_2d(q) @ proj.T
        x = MARGIN + (q[:, 0] - lo[0]) * scale
        y = SIZE - MARGIN - (q[:, 1] - lo[1]) * scale
        return np.stack([x, y], axis=1)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
             f'viewBox="0 0 {SIZE} {SIZE}">',
             f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>']
    edges = []
    for i in range(2 ** n):
        for j in range(i + 1, 2 ** n):
            if bin(i ^ j).count("1") == 1:
                edges.append((i, j))
    corners = np.array([[spec.domain * ((k >> a) & 1) for a in range(n)] for k in range(2 ** n)])
    for i, j in edges:
        (x1, y1), (x2, y2) = px(corners[[i, j]])
        parts.append(f'<line class="frame" x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" '
                     f'y2="{y2:.3f}" stroke="#888" stroke-width="1"/>')
    counts = []
    for layer in spec.layers:
        color, op = escape(layer.color), layer.opacity
        if layer.kind == "cloud":
            pts = np.asarray(layer.data, dtype=float)
            pts = _replicate(pts, spec.domain) if len(pts) else pts
            if len(pts) > spec.max_cloud_points:
                pts = pts[:: int(math.ceil(len(pts) / spec.max_cloud_points))]
            for x, y in (px(pts) if len(pts) else []):
                parts.append(f'<circle class="cloud" cx="{x:.2f}" cy="{y:.2f}" r="0.8" '
                             f'fill="{color}" fill-opacity="{op}"/>')
            counts.append(("cloud", len(pts)))
        elif layer.kind == "cosets":
            shapes = coset_shapes(layer.data, spec.domain, n)
            for shape in shapes:
                q = px(np.array(shape, dtype=float))
                if len(q) == 1:
                    parts.append(f'<circle class="coset" cx="{q[0, 0]:.3f}" cy="{q[0, 1]:.3f}" '
                                 f'r="2" fill="{color}"/>')
                elif len(q) == 2:
                    parts.append(f'<line class="coset" x1="{q[0, 0]:.3f}" y1="{q[0, 1]:.3f}" '
                                 f'x2="{q[1, 0]:.3f}" y2="{q[1, 1]:.3f}" stroke="{color}" '
                                 f'stroke-opacity="{op}" stroke-width="1.5"/>')
                else:
                    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in q)
                    parts.append(f'<polygon class="coset" points="{pts}" fill="{color}" '
                                 f'fill-opacity="{op * 0.4:.3f}" stroke="{color}"/>')
            counts.append(("cosets", len(shapes)))
        else:
            raise ValueError(f"unknown layer kind {layer.kind!r}")
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return {"svg": text, "counts": counts}


def render_png(spec: RenderSpec, path, dpi: int = 120) -> dict:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = _ambient(spec)
    proj, frame = _frame(spec, n)
    fig, ax = plt.subplots(figsize=(SIZE / dpi, SIZE / dpi), dpi=dpi)
    ax.set_aspect("equal")
    ax.set_axis_off()
    lo, hi = frame.min(axis=0), frame.max(axis=0)
    pad = 0.03 * float((hi - lo).max() or 1)
    ax.set_xlim(lo[0] - pad, hi[0] + pad)
    ax.set_ylim(lo[1] - pad, hi[1] + pad)
    corners = np.array([[spec.domain * ((k >> a) & 1) for a in range(n)] for k in range(2 ** n)],
                       dtype=float) @ proj.T
    for i in range(2 ** n):
        for j in range(i + 1, 2 ** n):
            if bin(i ^ j).count("1") == 1:
                ax.plot(*corners[[i, j]].T, color="#888", lw=0.6)
    counts = []
    for layer in spec.layers:
        if layer.kind == "cloud":
            pts = np.asarray(layer.data, dtype=float)
            pts = _replicate(pts, spec.domain) if len(pts) else pts
            if len(pts):
                q = pts @ proj.T
                ax.scatter(q[:, 0], q[:, 1], s=0.3, c=layer.color, alpha=layer.opacity,
                           linewidths=0)
            counts.append(("cloud", len(pts)))
        else:
            shapes = coset_shapes(layer.data, spec.domain, n)
            for shape in shapes:
                q = np.array(shape, dtype=float) @ proj.T
                if len(q) >= 3:
                    ax.fill(q[:, 0], q[:, 1], color=layer.color, alpha=layer.opacity * 0.4)
                else:
                    ax.plot(q[:, 0], q[:, 1], color=layer.color, lw=1.2, alpha=layer.opacity)
            counts.append(("cosets", len(shapes)))
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return {"counts": counts}


def render(spec: RenderSpec, path) -> dict:
    if str(path).endswith(".png"):
        return render_png(spec, path)
    return render_svg(spec, path)
