# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; same contracts as ``_pykernels``."""
from fractions import Fraction
from math import lcm


cdef inline tuple _eadd(tuple e1, tuple e2):
    cdef Py_ssize_t i, n = len(e1)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = <long>e1[i] + <long>e2[i]
    return tuple(out)


def poly_add(dict a, dict b, scale=1):
    cdef dict out = dict(a)
    if not scale:
        return out
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c * scale
        else:
            v = v + c * scale
            if v:
                out[e] = v
            else:
                del out[e]
    return out


cdef tuple _integerize(dict a):
    den = 1
    for c in a.values():
        den = lcm(den, c.denominator)
    return {e: c.numerator * (den // c.denominator) for e, c in a.items()}, den


def poly_mul(dict a, dict b):
    cdef dict out = {}
    cdef dict ia, ib
    cdef tuple e
    if len(a) > len(b):
        a, b = b, a
    ia, da = _integerize(a)
    ib, db = _integerize(b)
    for e1, c1 in ia.items():
        for e2, c2 in ib.items():
            e = _eadd(<tuple>e1, <tuple>e2)
            v = out.get(e)
            if v is None:
                out[e] = c1 * c2
            else:
                out[e] = v + c1 * c2
    den = da * db
    return {k: Fraction(c, den) for k, c in out.items() if c}


def poly_mul_term(dict a, tuple exp, coeff):
    if not coeff:
        return {}
    cdef dict out = {}
    for e, c in a.items():
        out[_eadd(<tuple>e, exp)] = c * coeff
    return out


cdef dict _axpy(dict v, dict row, c):
    # v -= c * row, in place
    for col, x in row.items():
        y = v.get(col)
        if y is None:
            v[col] = -c * x
        else:
            y = y - c * x
            if y:
                v[col] = y
            else:
                del v[col]
    return v


def reduce_vector(dict vec, list rows, list pivots):
    cdef dict v = dict(vec)
    cdef list coords = []
    cdef Py_ssize_t t, n = len(rows)
    for t in range(n):
        c = v.get(pivots[t])
        if c:
            _axpy(v, <dict>rows[t], c)
            coords.append(c)
        else:
            coords.append(0)
    return coords, v


def rref(vectors, colkey):
    cdef list rows = []
    cdef list pivots = []
    cdef dict v, row, nr
    cdef Py_ssize_t t
    for vec in vectors:
        _, v = reduce_vector(vec, rows, pivots)
        if not v:
            continue
        p = min(v, key=colkey)
        inv = 1 / v[p]
        v = {col: x * inv for col, x in v.items()}
        for t in range(len(rows)):
            row = <dict>rows[t]
            c = row.get(p)
            if c:
                nr = dict(row)
                _axpy(nr, v, c)
                rows[t] = nr
        rows.append(v)
        pivots.append(p)
    order = sorted(range(len(rows)), key=lambda i: colkey(pivots[i]))
    return [rows[i] for i in order], [pivots[i] for i in order]
