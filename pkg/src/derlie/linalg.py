"""Dense exact linear algebra over the rationals and over K(x1..xn)."""
from __future__ import annotations

from fractions import Fraction

from derlie import kernels


def _ident(c):
    return c


def to_sparse(vec):
    return {j: Fraction(x) for j, x in enumerate(vec) if x}


def to_dense(row, d):
    out = [Fraction(0)] * d
    for j, x in row.items():
        out[j] = x
    return out


def row_basis(vectors, d):
    """Canonical (RREF) basis of the row space, as dense vectors."""
    rows, _ = kernels.rref([to_sparse(v) for v in vectors], _ident)
    return [to_dense(r, d) for r in rows]


def rank(vectors):
    rows, _ = kernels.rref([to_sparse(v) for v in vectors], _ident)
    return len(rows)


def nullspace(matrix, d):
    """Canonical basis of ``{x : matrix @ x = 0}`` for a matrix with ``d`` columns."""
    rows, pivots = kernels.rref([to_sparse(r) for r in matrix], _ident)
    pivset = set(pivots)
    basis = []
    for f in range(d):
        if f in pivset:
            continue
        v = [Fraction(0)] * d
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            c = row.get(f)
            if c:
                v[p] = -c
        basis.append(v)
    return row_basis(basis, d)


class CoordSpace:
    """Subspace of Q^d with a reduced basis, for membership and residuals."""

    def __init__(self, vectors, d):
        self.d = d
        self.rows, self.pivots = kernels.rref([to_sparse(v) for v in vectors], _ident)

    @property
    def dim(self):
        return len(self.rows)

    def basis(self):
        return [to_dense(r, self.d) for r in self.rows]

    def residual(self, vec):
        _, r = kernels.reduce_vector(to_sparse(vec), self.rows, self.pivots)
        return r

    def contains(self, vec):
        return not self.residual(vec)


def matmul(a, b):
    n, m = len(a), len(b[0]) if b else 0
    inner = len(b)
    return [[sum((a[i][t] * b[t][j] for t in range(inner)), Fraction(0)) for j in range(m)] for i in range(n)]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def is_nilpotent_matrix(a):
    n = len(a)
    if n == 0:
        return True
    p = a
    # nilpotent iff a^n == 0; square until the exponent reaches n
    k = 1
    while k < n:
        p = matmul(p, p)
        k *= 2
    return is_zero_matrix(p)


def rf_echelon(rows, ncols):
    """Reduced row echelon form over the rational-function field.

    ``rows`` are sequences of ``RationalFunction``.  Pivots are chosen by
    column, first row with a nonzero entry.  Returns ``(rows, pivots)``;
    each returned row has a 1 at its pivot and zeros in other pivot columns.
    """
    work = [list(r) for r in rows]
    out = []
    pivots = []
    for col in range(ncols):
        src = next((t for t, r in enumerate(work) if not r[col].is_zero()), None)
        if src is None:
            continue
        row = work.pop(src)
        inv = row[col].inverse()
        row = [x * inv if not x.is_zero() else x for x in row]
        for r in work + out:
            c = r[col]
            if not c.is_zero():
                for j in range(ncols):
                    if not row[j].is_zero():
                        r[j] = r[j] - c * row[j]
        out.append(row)
        pivots.append(col)
    return out, pivots
