import numpy as np
import pytest

from coamoeba_lab import _kernels
from coamoeba_lab._kernels import _collapse_py
from coamoeba_lab.homology import rasterize_complement
from coamoeba_lab.polyhedral import AffineSubspace

compiled = pytest.importorskip("coamoeba_lab._kernels._collapse")


def _complex(seed, n=3, res=8):
    rng = np.random.default_rng(seed)
    obstacles = []
    for _ in range(2):
        base = tuple(int(x) for x in rng.integers(-3, 4, n))
        base = tuple(b / 8 for b in base)
        direction = [tuple(int(x) for x in rng.integers(-2, 3, n))]
        if not any(direction[0]):
            direction = [(0,) * (n - 1) + (1,)]
        obstacles.append(AffineSubspace.make([__import__("fractions").Fraction(b) for b in base],
                                             direction))
    return rasterize_complement(obstacles, [(-1, 1)] * n, res)


def test_backend_reported():
    assert _kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("seed", range(6))
def test_backends_agree(seed):
    cx = _complex(seed)
    a, b = cx.present.copy(), cx.present.copy()
    cyc_a = np.zeros(len(a), dtype=np.int64)
    cyc_b = cyc_a.copy()
    na = compiled.collapse(a, cx.shape, cyc_a, -1)
    nb = _collapse_py.collapse(b, cx.shape, cyc_b, -1)
    assert na == nb
    assert np.array_equal(a, b)
