"""Exact dense linear algebra over the session scalars (lists of lists)."""

from __future__ import annotations

from gmpy2 import mpq

from .scalars import inv


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        li = inv(m[r][c])
        m[r] = [x * li for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols=None):
    """Basis of {v : rows . v = 0}, one vector per free column."""
    if not rows:
        n = ncols or 0
        return [[mpq(1) if i == j else mpq(0) for i in range(n)] for j in range(n)]
    ncols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for r, c in enumerate(pivots):
            v[c] = -m[r][f]
        basis.append(v)
    return basis


def matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), mpq(0)) for j in range(len(b[0]))] for i in range(len(a))]


def identity(n):
    return [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)]


def det(a):
    m = [list(r) for r in a]
    n = len(m)
    d = mpq(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d = d * m[c][c]
        li = inv(m[c][c])
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * li
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a):
    n = len(a)
    aug = [list(a[i]) + identity(n)[i] for i in range(n)]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def solve(a, b):
    """Some x with a x = b, or None."""
    n = len(a[0])
    aug = [list(a[i]) + [b[i]] for i in range(len(a))]
    m, piv = rref(aug)
    if n in piv:
        return None
    x = [mpq(0)] * n
    for r, c in enumerate(piv):
        x[c] = m[r][n]
    return x
