"""Compare the compiled and pure-Python free-face collapse kernels.

    python3 benchmarks/bench_kernels.py [--res 16 24 32] [--repeat 3]

Both kernels run on the same rasterized complement (box minus two skew
lines in R^3); the script checks that they agree before reporting times.
"""

import argparse
import time
from fractions import Fraction as F

import numpy as np

from coamoeba_lab._kernels import _collapse_py
from coamoeba_lab.homology import rasterize_complement
from coamoeba_lab.polyhedral import AffineSubspace

try:
    from coamoeba_lab._kernels import _collapse as _compiled
except ImportError:
    _compiled = None


def obstacle():
    return [AffineSubspace.make((F(1, 3), F(1, 3), 0), [(0, 0, 1)]),
            AffineSubspace.make((0, F(-1, 3), F(1, 5)), [(1, 0, 0)])]


def best_of(fn, cx, repeat):
    times, result = [], None
    for _ in range(repeat):
        present = cx.present.copy()
        cycle = np.zeros(len(present), dtype=np.int64)
        t0 = time.perf_counter()
        count = fn(present, cx.shape, cycle, -1)
        times.append(time.perf_counter() - t0)
        result = (count, present)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--res", type=int, nargs="+", default=[12, 16, 24])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'res':>5} {'cells':>10} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for res in args.res:
        cx = rasterize_complement(obstacle(), [(-1, 1)] * 3, res)
        t_py, (n_py, p_py) = best_of(_collapse_py.collapse, cx, args.repeat)
        if _compiled is None:
            print(f"{res:>5} {int(cx.present.sum()):>10} {t_py:>10.3f} {'-':>13} {'-':>8}")
            continue
        t_c, (n_c, p_c) = best_of(_compiled.collapse, cx, args.repeat)
        if n_py != n_c or not np.array_equal(p_py, p_c):
            raise SystemExit(f"kernels disagree at res {res}")
        print(f"{res:>5} {int(cx.present.sum()):>10} {t_py:>10.3f} {t_c:>13.4f} "
              f"{t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
