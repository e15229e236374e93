"""Pure-Python free-face collapse on a doubled cubical grid.

Cells live on the doubled grid of shape (2r+1,)*n, flattened in C order; a
cell's dimension is its number of odd coordinates.  A cell with exactly one
present coface is free, and the pair is removed.  When a removed free face
carries weight in the tracked cycle, the cycle is replaced by the homologous
chain ``c - a * [tau : sigma] * boundary(tau)``.
"""

import numpy as np


def _coords(idx, shape):
    out = [0] * len(shape)
    for ax in range(len(shape) - 1, -1, -1):
        idx, out[ax] = divmod(idx, shape[ax])
    return out


def collapse(present, shape, cycle, cycle_dim):
    """Collapse ``present`` (uint8, flat) in place; push ``cycle`` (int64, flat) along.

    Returns the number of elementary collapses performed.
    """
    shape = [int(s) for s in shape]
    n = len(shape)
    strides = [1] * n
    for ax in range(n - 2, -1, -1):
        strides[ax] = strides[ax + 1] * shape[ax + 1]
    pres = present
    cyc = cycle
    stack = list(np.flatnonzero(pres)[::-1])
    count = 0
    while stack:
        s = int(stack.pop())
        if not pres[s]:
            continue
        co = _coords(s, shape)
        found = 0
        tau = -1
        tau_ax = 0
        tau_dir = 0
        for ax in range(n):
            if co[ax] & 1:
                continue
            for d in (-1, 1):
                c = co[ax] + d
                if 0 <= c < shape[ax]:
                    t = s + d * strides[ax]
                    if pres[t]:
                        found += 1
                        tau, tau_ax, tau_dir = t, ax, d
            if found > 1:
                break
        if found != 1:
            continue
        dim_s = sum(x & 1 for x in co)
        tco = list(co)
        tco[tau_ax] += tau_dir
        odd = [ax for ax in range(n) if tco[ax] & 1]
        if cycle_dim == dim_s and cyc[s] != 0:
            j = odd.index(tau_ax)
            sgn = 1 if j % 2 == 0 else -1
            inc = sgn if tau_dir == -1 else -sgn
            a = int(cyc[s])
            for jj, ax in enumerate(odd):
                e = 1 if jj % 2 == 0 else -1
                cyc[tau + strides[ax]] -= a * inc * e
                cyc[tau - strides[ax]] += a * inc * e
        pres[s] = 0
        pres[tau] = 0
        count += 1
        for ax in odd:
            for f in (tau + strides[ax], tau - strides[ax]):
                if pres[f]:
                    stack.append(f)
        for ax in range(n):
            if co[ax] & 1:
                for f in (s + strides[ax], s - strides[ax]):
                    if pres[f]:
                        stack.append(f)
    return count
