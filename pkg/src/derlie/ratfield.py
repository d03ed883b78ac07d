"""Multivariate polynomials and rational functions over the rationals.

Everything here is immutable.  Polynomials are sparse maps from exponent
tuples to ``Fraction`` coefficients; the term order is graded
lexicographic.  A ``RationalFunction`` is always stored in canonical form:
numerator and denominator coprime, denominator monic with respect to the
graded-lex leading term, zero stored as ``0/1``.

Variable indices are 0-based in methods (``Polynomial.diff(k)``) and
1-based in the module-level operations ``rf_partial`` and the textual
grammar (``x1``..``xn``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from typing import Iterable, Mapping

from derlie import kernels
from derlie.errors import DerlieError


class RationalDivisionError(ZeroDivisionError, DerlieError):
    """Division by the zero element of R."""

    def __init__(self, msg="division by zero in R"):
        super().__init__(msg)


@dataclass(frozen=True)
class VarContext:
    """Number of variables and their printed names."""

    n: int
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a context needs at least one variable")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i + 1}" for i in range(self.n)))
        else:
            object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) != self.n or len(set(self.names)) != self.n:
            raise ValueError("variable names must be n distinct identifiers")

    def index(self, name: str) -> int:
        return self.names.index(name)


def grlex_key(e):
    return (sum(e), e)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("floating-point coefficients are not supported; use Fraction")
    return Fraction(c)


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars or min(e, default=0) < 0:
                    raise ValueError(f"bad exponent vector {e} for {nvars} variables")
                c = _as_fraction(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars, c):
        c = _as_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars):
        return cls.constant(nvars, 1)

    @classmethod
    def var(cls, nvars, k):
        e = [0] * nvars
        e[k] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, nvars, exp, coeff=1):
        return cls(nvars, {tuple(exp): coeff})

    # predicates and accessors

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_monomial(self):
        return len(self.terms) == 1

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_exponent(self):
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_exponent()] if self.terms else Fraction(0)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, k):
        return max((e[k] for e in self.terms), default=-1)

    def variables(self):
        return frozenset(k for e in self.terms for k, x in enumerate(e) if x)

    def coefficients_in(self, k) -> dict[int, "Polynomial"]:
        """Split as a polynomial in variable ``k``: power -> coefficient."""
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            d = e[k]
            parts.setdefault(d, {})[e[:k] + (0,) + e[k + 1:]] = c
        return {d: Polynomial._raw(self.nvars, t) for d, t in parts.items()}

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials from different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(self.nvars, kernels.poly_add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(self.nvars, kernels.poly_add(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial._raw(self.nvars, kernels.poly_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        c = _as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: x * c for e, x in self.terms.items()})

    def mul_term(self, exp, coeff):
        return Polynomial._raw(self.nvars, kernels.poly_mul_term(self.terms, tuple(exp), _as_fraction(coeff)))

    def diff(self, k):
        out = {}
        for e, c in self.terms.items():
            d = e[k]
            if d:
                out[e[:k] + (d - 1,) + e[k + 1:]] = c * d
        return Polynomial._raw(self.nvars, out)

    def monic(self):
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        return self if lc == 1 else self.scale(1 / lc)

    def divmod_exact(self, other: "Polynomial"):
        """Divide by ``other`` under graded-lex order.

        Returns the quotient, or ``None`` when ``other`` does not divide
        ``self`` exactly.
        """
        if other.is_zero():
            raise RationalDivisionError()
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lt = other.leading_exponent()
        lc = other.terms[lt]
        rem = dict(self.terms)
        quot = {}
        while rem:
            e = max(rem, key=grlex_key)
            shift = tuple(a - b for a, b in zip(e, lt))
            if min(shift) < 0:
                return None
            q = rem[e] / lc
            quot[shift] = q
            rem = kernels.poly_add(rem, kernels.poly_mul_term(other.terms, shift, q), -1)
        return Polynomial._raw(self.nvars, quot)

    def exact_div(self, other):
        q = self.divmod_exact(other)
        if q is None:
            raise ArithmeticError("inexact polynomial division")
        return q

    def integer_primitive(self):
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // igcd(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = igcd(num, c.numerator * (den // c.denominator))
        s = Fraction(den, num)
        if self.leading_coefficient() < 0:
            s = -s
        return self if s == 1 else self.scale(s)

    def evaluate(self, point):
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t *= Fraction(x) ** k
            total += t
        return total

    # identity

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


# gcd and content

def _content_in(p: Polynomial, k: int) -> Polynomial:
    result = None
    for c in p.coefficients_in(k).values():
        result = c.monic() if result is None else poly_gcd(result, c)
        if result.is_constant():
            return Polynomial.one(p.nvars)
    return result


def _prem(a: Polynomial, b: Polynomial, k: int) -> Polynomial:
    """Pseudo-remainder ``prem(a, b) = lc(b)^(da - db + 1) * a mod b`` in variable ``k``."""
    db = b.degree_in(k)
    lb = b.coefficients_in(k)[db]
    r = a
    budget = a.degree_in(k) - db + 1
    while not r.is_zero():
        dr = r.degree_in(k)
        if dr < db:
            break
        lr = r.coefficients_in(k)[dr]
        shift = [0] * a.nvars
        shift[k] = dr - db
        r = lb * r - (lr * b).mul_term(shift, 1)
        budget -= 1
    if budget > 0 and not r.is_zero():
        r = r * lb ** budget
    return r


def _primitive_in(p: Polynomial, k: int) -> Polynomial:
    c = _content_in(p, k)
    if not c.is_constant():
        p = p.exact_div(c)
    return p.integer_primitive()


def _lc_in(p: Polynomial, k: int) -> Polynomial:
    return p.coefficients_in(k)[p.degree_in(k)]


def _specialize(p: Polynomial, k: int, point) -> list:
    """Dense univariate image in variable ``k`` after substituting ``point`` elsewhere."""
    out = [Fraction(0)] * (p.degree_in(k) + 1)
    for e, c in p.terms.items():
        t = c
        for j, x in enumerate(e):
            if x and j != k:
                t *= point[j] ** x
        out[e[k]] += t
    return out


def _uni_gcd_degree(a: list, b: list) -> int:
    def trim(u):
        while u and not u[-1]:
            u.pop()
        return u
    a, b = trim(list(a)), trim(list(b))
    while b:
        r = list(a)
        db, lb = len(b) - 1, b[-1]
        while len(r) - 1 >= db and r:
            q = r[-1] / lb
            shift = len(r) - 1 - db
            for i, c in enumerate(b):
                r[shift + i] -= q * c
            trim(r)
        a, b = b, r
    return len(a) - 1


_EVAL_POINTS = ((3, -5, 7, 2, -11, 13), (-4, 9, 5, -7, 17, 6), (8, 3, -13, 19, 4, -2))


def _coprime_in(a: Polynomial, b: Polynomial, k: int) -> bool:
    """Sound one-sided test: True only if gcd(a, b) has degree 0 in variable ``k``."""
    da, db = a.degree_in(k), b.degree_in(k)
    for base in _EVAL_POINTS:
        point = [Fraction(base[j % len(base)] + j // len(base)) for j in range(a.nvars)]
        ua, ub = _specialize(a, k, point), _specialize(b, k, point)
        if not ua[da] or not ub[db]:
            continue
        return _uni_gcd_degree(ua, ub) == 0
    return False


def _subresultant_gcd(A: Polynomial, B: Polynomial, k: int) -> Polynomial:
    """Gcd of polynomials primitive in variable ``k`` via the subresultant PRS."""
    one = Polynomial.one(A.nvars)
    if A.degree_in(k) < B.degree_in(k):
        A, B = B, A
    g = h = one
    while True:
        delta = A.degree_in(k) - B.degree_in(k)
        R = _prem(A, B, k)
        if R.is_zero():
            return _primitive_in(B, k)
        if R.degree_in(k) == 0:
            return one
        A, B = B, R.exact_div(g * h ** delta)
        g = _lc_in(A, k)
        if delta == 1:
            h = g
        elif delta > 1:
            h = (g ** delta).exact_div(h ** (delta - 1))


def _monomial_gcd(m: Polynomial, p: Polynomial) -> Polynomial:
    e = next(iter(m.terms))
    for t in p.terms:
        e = tuple(map(min, e, t))
    return Polynomial._raw(m.nvars, {e: Fraction(1)})


@lru_cache(maxsize=65536)
def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the rationals.

    Recursive: split off contents with respect to a main variable, then run
    a subresultant remainder sequence on the primitive parts.  An
    evaluation test proves most coprime pairs coprime without the sequence.
    """
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Polynomial.one(a.nvars)
    if a == b:
        return a.monic()
    if a.is_monomial():
        return _monomial_gcd(a, b)
    if b.is_monomial():
        return _monomial_gcd(b, a)
    va, vb = a.variables(), b.variables()
    for k in sorted(va ^ vb):
        if k in va:
            return poly_gcd(_content_in(a, k), b)
        return poly_gcd(a, _content_in(b, k))
    k = min(va, key=lambda j: (max(a.degree_in(j), b.degree_in(j)), j))
    ca, cb = _content_in(a, k), _content_in(b, k)
    c = poly_gcd(ca, cb)
    if _coprime_in(a, b, k):
        return c
    pa = a.exact_div(ca).integer_primitive()
    pb = b.exact_div(cb).integer_primitive()
    q = pa.divmod_exact(pb) if pa.degree() >= pb.degree() else pb.divmod_exact(pa)
    if q is not None:
        g = pb if pa.degree() >= pb.degree() else pa
    else:
        g = _subresultant_gcd(pa, pb, k)
    return (c * g).monic()


def poly_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero() or b.is_zero():
        return Polynomial.zero(a.nvars)
    return (a * b.exact_div(poly_gcd(a, b))).monic()


# rational functions

class RationalFunction:
    """Element of K(x1..xn) in canonical reduced form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.one(num.nvars)
        r = rf_normalize(num, den)
        self.num, self.den, self._hash = r.num, r.den, None

    @classmethod
    def _raw(cls, num, den):
        r = cls.__new__(cls)
        r.num = num
        r.den = den
        r._hash = None
        return r

    @classmethod
    def zero(cls, nvars):
        return cls._raw(Polynomial.zero(nvars), Polynomial.one(nvars))

    @classmethod
    def one(cls, nvars):
        return cls.constant(nvars, 1)

    @classmethod
    def constant(cls, nvars, c):
        return cls._raw(Polynomial.constant(nvars, c), Polynomial.one(nvars))

    @classmethod
    def from_poly(cls, p: Polynomial):
        return cls._raw(p, Polynomial.one(p.nvars))

    @classmethod
    def var(cls, nvars, k):
        return cls.from_poly(Polynomial.var(nvars, k))

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.nvars != self.nvars:
                raise ValueError("rational functions from different contexts")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return rf_arith(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return rf_arith(self, other, "sub")

    def __rsub__(self, other):
        return -self + other

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction._raw(self.num.scale(other), self.den) if other else RationalFunction.zero(self.nvars)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return rf_arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return rf_arith(self, other, "div")

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("exponent must be an integer")
        if k < 0:
            return self.inverse() ** -k
        return RationalFunction._raw(self.num ** k, self.den ** k)

    def inverse(self):
        if self.is_zero():
            raise RationalDivisionError()
        return rf_normalize(self.den, self.num)

    def partial(self, k: int) -> "RationalFunction":
        """Derivative by the variable with 0-based index ``k``."""
        dn = self.num.diff(k)
        if self.den.is_constant():
            return RationalFunction._raw(dn, self.den)
        dd = self.den.diff(k)
        if dd.is_zero():
            return rf_normalize(dn, self.den)
        return rf_normalize(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if not d:
            raise RationalDivisionError("denominator vanishes at evaluation point")
        return self.num.evaluate(point) / d

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Polynomial)):
            return self.den.is_constant() and self.num == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def __repr__(self):
        return f"RationalFunction({format_rational(self)!r})"

    def __str__(self):
        return format_rational(self)


def rf_normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    """Canonical representative of ``num/den``."""
    if den.is_zero():
        raise RationalDivisionError()
    if num.is_zero():
        return RationalFunction.zero(num.nvars)
    if den.is_constant():
        c = den.constant_value()
        return RationalFunction._raw(num if c == 1 else num.scale(1 / c), Polynomial.one(num.nvars))
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = num.exact_div(g)
        den = den.exact_div(g)
    lc = den.leading_coefficient()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return RationalFunction._raw(num, den)


def rf_arith(a: RationalFunction, b: RationalFunction, kind: str) -> RationalFunction:
    """Field operation ``kind`` in {add, sub, mul, div}; result canonical."""
    if kind == "sub":
        b, kind = -b, "add"
    if kind == "div":
        if b.is_zero():
            raise RationalDivisionError()
        b, kind = RationalFunction._raw(b.den, b.num), "mul"
    if kind == "add":
        if a.is_zero():
            return b if b.den.leading_coefficient() == 1 else rf_normalize(b.num, b.den)
        if b.is_zero():
            return a
        if a.den == b.den:
            return rf_normalize(a.num + b.num, a.den)
        # for reduced inputs gcd(num, den) divides g = gcd(a.den, b.den)
        g = poly_gcd(a.den, b.den)
        bd, ad = b.den.exact_div(g), a.den.exact_div(g)
        num = a.num * bd + b.num * ad
        if num.is_zero():
            return RationalFunction.zero(a.nvars)
        den = a.den * bd
        if not g.is_constant():
            h = poly_gcd(num, g)
            if not h.is_constant():
                num, den = num.exact_div(h), den.exact_div(h)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return RationalFunction._raw(num, den)
    if kind == "mul":
        if a.is_zero() or b.is_zero():
            return RationalFunction.zero(a.nvars)
        # cross-cancel: a.num/a.den * b.num/b.den with both inputs reduced
        g1 = poly_gcd(a.num, b.den)
        g2 = poly_gcd(b.num, a.den)
        an, bd = (a.num, b.den) if g1.is_constant() else (a.num.exact_div(g1), b.den.exact_div(g1))
        bn, ad = (b.num, a.den) if g2.is_constant() else (b.num.exact_div(g2), a.den.exact_div(g2))
        num, den = an * bn, ad * bd
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return RationalFunction._raw(num, den)
    raise ValueError(f"unknown operation {kind!r}")


def rf_partial(r: RationalFunction, i: int) -> RationalFunction:
    """Partial derivative by ``x_i`` with 1-based ``i``."""
    if not 1 <= i <= r.nvars:
        raise IndexError("variable index out of range")
    return r.partial(i - 1)


def rf_lcm_denominator(values: Iterable[RationalFunction], nvars: int) -> Polynomial:
    """Monic lcm of the denominators of ``values``."""
    out = Polynomial.one(nvars)
    for v in values:
        if not v.den.is_constant() and out != v.den:
            out = poly_lcm(out, v.den)
    return out


# printing

def _format_coeff_monomial(c: Fraction, e, names, leading: bool) -> str:
    mono = "*".join(
        names[k] if x == 1 else f"{names[k]}^{x}" for k, x in enumerate(e) if x
    )
    sign = "-" if c < 0 else ("" if leading else "+")
    a = abs(c)
    if not mono:
        body = str(a)
    elif a == 1:
        body = mono
    else:
        body = f"{a}*{mono}"
    if leading:
        return sign + body
    return f"{sign} {body}"


def format_polynomial(p: Polynomial, names=None) -> str:
    if names is None:
        names = tuple(f"x{i + 1}" for i in range(p.nvars))
    if p.is_zero():
        return "0"
    parts = [
        _format_coeff_monomial(c, e, names, t == 0)
        for t, (e, c) in enumerate(p.sorted_terms())
    ]
    return " ".join(parts)


def format_rational(r: RationalFunction, names=None) -> str:
    num = format_polynomial(r.num, names)
    if r.den.is_constant():
        return num
    if len(r.num.terms) > 1:
        num = f"({num})"
    den = format_polynomial(r.den, names)
    if len(r.den.terms) > 1 or not r.den.leading_coefficient() == 1 or r.den.degree() == 0:
        den = f"({den})"
    elif "*" in den:
        den = f"({den})"
    return f"{num}/{den}"
