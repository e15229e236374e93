"""Integer lattice helpers: Hermite and Smith normal forms, integer kernels."""

from __future__ import annotations

from fractions import Fraction


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hnf_rows(rows):
    """Row-style Hermite normal form of the lattice spanned by integer rows.

    Pivots are positive, entries above each pivot are reduced into [0, pivot),
    zero rows are dropped.  Equal lattices give identical output.
    """
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    n = len(a[0])
    r = 0
    for c in range(n):
        # gcd-combine column c among rows r..end
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c] != 0:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c] != 0:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == len(a):
                break
    return [tuple(row) for row in a[:r] if any(row)]


def integer_kernel(rows, n):
    """HNF basis (as rows) of the saturated lattice {x in Z^n : rows . x = 0}.

    ``rows`` may hold rationals; they are cleared to integers first.
    """
    mat = []
    for r in rows:
        fr = [Fraction(x) for x in r]
        lcm = 1
        for x in fr:
            lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
        mat.append([int(x * lcm) for x in fr])
    if not mat:
        return hnf_rows(_identity(n))
    # column operations on mat, mirrored on v, until mat is in column echelon form
    m = [row[:] for row in mat]
    v = _identity(n)
    col = 0
    for i in range(len(m)):
        if col >= n:
            break
        while True:
            nz = [j for j in range(col, n) if m[i][j] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(m[i][j]))
            _swap_cols(m, col, piv)
            _swap_cols(v, col, piv)
            done = True
            for j in range(col + 1, n):
                if m[i][j] != 0:
                    q = m[i][j] // m[i][col]
                    _add_col(m, j, col, -q)
                    _add_col(v, j, col, -q)
                    if m[i][j] != 0:
                        done = False
            if done:
                break
        if any(m[i][j] != 0 for j in range(col, n)):
            col += 1
    kernel = [[v[r][j] for r in range(n)] for j in range(col, n)]
    return hnf_rows(kernel)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _swap_cols(m, i, j):
    if i != j:
        for row in m:
            row[i], row[j] = row[j], row[i]


def _add_col(m, target, source, factor):
    for row in m:
        row[target] += factor * row[source]


def smith(a):
    """Smith normal form.  Returns (d, u, v) with u @ a @ v == d, u and v unimodular.

    ``d`` is a list of rows; its diagonal entries are nonnegative and each
    divides the next.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, r)) for r in a]
    u = _identity(m)
    v = _identity(n)
    t = 0
    while t < min(m, n):
        nz = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j] != 0]
        if not nz:
            break
        _, pi, pj = min(nz)
        d[t], d[pi] = d[pi], d[t]
        u[t], u[pi] = u[pi], u[t]
        _swap_cols(d, t, pj)
        _swap_cols(v, t, pj)
        while True:
            changed = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    d[i] = [x - q * y for x, y in zip(d[i], d[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                    if d[i][t] != 0:
                        d[t], d[i] = d[i], d[t]
                        u[t], u[i] = u[i], u[t]
                        changed = True
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    _add_col(d, j, t, -q)
                    _add_col(v, j, t, -q)
                    if d[t][j] != 0:
                        _swap_cols(d, t, j)
                        _swap_cols(v, t, j)
                        changed = True
            if changed:
                continue
            # divisibility: d[t][t] must divide the remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if d[i][j] % d[t][t] != 0), None)
            if bad is None:
                break
            i, _ = bad
            d[t] = [x + y for x, y in zip(d[t], d[i])]
            u[t] = [x + y for x, y in zip(u[t], u[i])]
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return d, u, v


def smith_diagonal(a):
    if not a or not a[0]:
        return []
    d, _, _ = smith(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]))) if d[i][i] != 0]


def in_integer_image(a, c) -> bool:
    """Whether the integer vector c lies in the Z-column span of the integer matrix a."""
    m = len(c)
    if m == 0:
        return True
    if not a or not a[0]:
        return all(x == 0 for x in c)
    d, u, _ = smith(a)
    uc = [sum(u[i][k] * c[k] for k in range(m)) for i in range(m)]
    r = min(len(d), len(d[0]))
    for i in range(m):
        di = d[i][i] if i < r else 0
        if di == 0:
            if uc[i] != 0:
                return False
        elif uc[i] % di != 0:
            return False
    return True
