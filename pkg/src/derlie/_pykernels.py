"""Pure-Python kernels.

Sparse polynomials are dicts mapping exponent tuples to ``Fraction``;
sparse vectors are dicts mapping hashable column labels to ``Fraction``.
``_speedups.pyx`` implements the same functions and must stay in sync.
"""
from fractions import Fraction
from math import lcm


def poly_add(a, b, scale=1):
    """Return ``a + scale*b`` as a new dict with zeros dropped."""
    out = dict(a)
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


def _integerize(a):
    """Scale coefficients to integers: returns ``(int_coeffs, common_denominator)``."""
    den = 1
    for c in a.values():
        den = lcm(den, c.denominator)
    return {e: c.numerator * (den // c.denominator) for e, c in a.items()}, den


def poly_mul(a, b):
    # accumulate integer products over the common denominator; one reduction per output term
    if len(a) > len(b):
        a, b = b, a
    ia, da = _integerize(a)
    ib, db = _integerize(b)
    out = {}
    get = out.get
    for e1, c1 in ia.items():
        for e2, c2 in ib.items():
            e = tuple([x + y for x, y in zip(e1, e2)])
            out[e] = get(e, 0) + c1 * c2
    den = da * db
    return {e: Fraction(c, den) for e, c in out.items() if c}


def poly_mul_term(a, exp, coeff):
    """Multiply ``a`` by the single term ``coeff * x^exp``."""
    if not coeff:
        return {}
    return {tuple([x + y for x, y in zip(e, exp)]): c * coeff for e, c in a.items()}


def reduce_vector(vec, rows, pivots):
    """Eliminate ``vec`` against reduced rows.

    ``rows[t]`` has a 1 in column ``pivots[t]`` and zeros in every other
    pivot column.  Returns ``(coords, residual)``.
    """
    v = dict(vec)
    coords = []
    for row, p in zip(rows, pivots):
        c = v.get(p)
        if c:
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
            coords.append(c)
        else:
            coords.append(0)
    return coords, v


def rref(vectors, colkey):
    """Reduced row echelon form of sparse rows.

    Pivot of a row is its column minimising ``colkey``.  Returns
    ``(rows, pivots)`` sorted by pivot key; this is the unique canonical
    basis of the row space for the given column order.
    """
    rows = []
    pivots = []
    for vec in vectors:
        _, v = reduce_vector(vec, rows, pivots)
        if not v:
            continue
        p = min(v, key=colkey)
        inv = 1 / v[p]
        v = {col: x * inv for col, x in v.items()}
        for t, row in enumerate(rows):
            c = row.get(p)
            if c:
                nr = dict(row)
                for col, x in v.items():
                    y = nr.get(col, 0) - c * x
                    if y:
                        nr[col] = y
                    else:
                        nr.pop(col, None)
                rows[t] = nr
        rows.append(v)
        pivots.append(p)
    order = sorted(range(len(rows)), key=lambda t: colkey(pivots[t]))
    return [rows[t] for t in order], [pivots[t] for t in order]
