# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled free-face collapse; same contract as the pure-Python twin."""

from libcpp.vector cimport vector


def collapse(unsigned char[::1] present, shape, long long[::1] cycle, int cycle_dim):
    cdef int n = len(shape)
    cdef long long shp[8]
    cdef long long strides[8]
    cdef long long co[8]
    cdef int odd[8]
    cdef int ax, d, found, tau_ax, tau_dir, nodd, j, jj, dim_s
    cdef long long s, t, tau, c, rem, a, inc, sgn, e, f
    cdef long long ncells = present.shape[0]
    cdef long long count = 0
    cdef vector[long long] stack
    if n > 8:
        raise ValueError("at most 8 dimensions")
    for ax in range(n):
        shp[ax] = shape[ax]
    strides[n - 1] = 1
    for ax in range(n - 2, -1, -1):
        strides[ax] = strides[ax + 1] * shp[ax + 1]
    for s in range(ncells - 1, -1, -1):
        if present[s]:
            stack.push_back(s)
    while stack.size() > 0:
        s = stack.back()
        stack.pop_back()
        if not present[s]:
            continue
        rem = s
        for ax in range(n - 1, -1, -1):
            co[ax] = rem % shp[ax]
            rem = rem // shp[ax]
        found = 0
        tau = -1
        tau_ax = 0
        tau_dir = 0
        for ax in range(n):
            if co[ax] & 1:
                continue
            for d in (-1, 1):
                c = co[ax] + d
                if c >= 0 and c < shp[ax]:
                    t = s + d * strides[ax]
                    if present[t]:
                        found += 1
                        tau = t
                        tau_ax = ax
                        tau_dir = d
            if found > 1:
                break
        if found != 1:
            continue
        dim_s = 0
        for ax in range(n):
            dim_s += co[ax] & 1
        nodd = 0
        j = 0
        for ax in range(n):
            if (co[ax] & 1) or ax == tau_ax:
                if ax == tau_ax:
                    j = nodd
                odd[nodd] = ax
                nodd += 1
        if cycle_dim == dim_s and cycle[s] != 0:
            sgn = 1 if j % 2 == 0 else -1
            inc = sgn if tau_dir == -1 else -sgn
            a = cycle[s]
            for jj in range(nodd):
                e = 1 if jj % 2 == 0 else -1
                cycle[tau + strides[odd[jj]]] -= a * inc * e
                cycle[tau - strides[odd[jj]]] += a * inc * e
        present[s] = 0
        present[tau] = 0
        count += 1
        for jj in range(nodd):
            f = tau + strides[odd[jj]]
            if present[f]:
                stack.push_back(f)
            f = tau - strides[odd[jj]]
            if present[f]:
                stack.push_back(f)
        for ax in range(n):
            if co[ax] & 1:
                f = s + strides[ax]
                if present[f]:
                    stack.push_back(f)
                f = s - strides[ax]
                if present[f]:
                    stack.push_back(f)
    return count
