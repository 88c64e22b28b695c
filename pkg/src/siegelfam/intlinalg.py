"""Small exact integer linear algebra: Smith normal form and lattice quotients.

Everything here works on plain Python ints (arbitrary precision), on the tiny
matrices that show up in class-group and Hecke-coset bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, src, dst, factor):
    m[dst] = [a + factor * b for a, b in zip(m[dst], m[src])]


def _add_col(m, src, dst, factor):
    for row in m:
        row[dst] += factor * row[src]


def smith_normal_form(mat):
    """Return (D, U, V) with U*mat*V = D, U, V unimodular, D in Smith form.

    `mat` is a list of lists of ints (r x c).  D has nonnegative diagonal
    entries d_1 | d_2 | ... ; U is r x r, V is c x c.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = [list(map(int, row)) for row in mat]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def pivot_pos(t):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        return best

    t = 0
    while True:
        pos = pivot_pos(t)
        if pos is None:
            break
        i, j = pos
        if i != t:
            _swap_rows(a, t, i)
            _swap_rows(u, t, i)
        if j != t:
            _swap_cols(a, t, j)
            _swap_cols(v, t, j)
        # clear row/column t; restart if a remainder creates a smaller pivot
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t] != 0:
                q = a[i][t] // a[t][t]
                _add_row(a, t, i, -q)
                _add_row(u, t, i, -q)
                if a[i][t] != 0:
                    dirty = True
        for j in range(t + 1, cols):
            if a[t][j] != 0:
                q = a[t][j] // a[t][t]
                _add_col(a, t, j, -q)
                _add_col(v, t, j, -q)
                if a[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # divisibility fix-up: pivot must divide the remaining block
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            _add_row(a, bad, t, 1)
            _add_row(u, bad, t, 1)
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
        if t == min(rows, cols):
            break
    return a, u, v


def mat_mul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def mat_inv_unimodular(m):
    """Inverse of a unimodular integer matrix, exact over the integers."""
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


def lattice_quotient_reps(ambient_basis, sub_basis):
    """Coset representatives of (lattice spanned by ambient) / (sub lattice).

    Both bases are lists of integer row vectors of the same dimension n, with
    the sub lattice of finite index in the ambient one.  Returns a list of
    integer vectors (elements of the ambient lattice), one per coset.
    """
    n = len(ambient_basis)
    amb = [list(b) for b in ambient_basis]
    amb_inv = _rational_inverse(amb)  # amb_inv[i][k] = (A^-1)_{k i}
    coords = []
    for s in sub_basis:
        c = [sum(Fraction(s[k]) * amb_inv[i][k] for k in range(n)) for i in range(n)]
        assert all(x.denominator == 1 for x in c), "sub lattice not inside ambient"
        coords.append([int(x) for x in c])
    # L = rowspan(coords); with U coords V = D, the map x -> x V turns L into
    # the rectangular lattice spanned by d_i e_i, so reps are t V^{-1}
    d, _u, v = smith_normal_form(coords)
    diag = [d[i][i] for i in range(n)]
    assert all(x != 0 for x in diag), "sub lattice not finite index"
    v_inv = mat_inv_unimodular(v)
    reps = []

    def gen(idx, cur):
        if idx == n:
            reps.append(list(cur))
            return
        for t in range(diag[idx]):
            gen(idx + 1, cur + [t])

    gen(0, [])
    out = []
    for t in reps:
        amb_coord = [sum(t[i] * v_inv[i][j] for i in range(n)) for j in range(n)]
        vec = [sum(amb_coord[j] * amb[j][k] for j in range(n)) for k in range(n)]
        out.append(vec)
    return out


def _rational_inverse(m):
    """Inverse of a nonsingular integer matrix, as Fractions (transposed layout)."""
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    # return transposed inverse so that row-vector * matrix products are easy
    return [[aug[j][n + i] for j in range(n)] for i in range(n)]
