"""Derivations of K(x1..xn) as coefficient vectors over the partials."""
from __future__ import annotations

from fractions import Fraction

from derlie.ratfield import (
    RationalFunction,
    VarContext,
    format_polynomial,
    format_rational,
)


class Derivation:
    """``sum_i coeffs[i] * d/dx_{i+1}`` with rational-function coefficients."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: VarContext, coeffs):
        coeffs = tuple(_to_rf(ctx, c) for c in coeffs)
        if len(coeffs) != ctx.n:
            raise ValueError(f"expected {ctx.n} coefficients, got {len(coeffs)}")
        self.ctx = ctx
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def _raw(cls, ctx, coeffs):
        d = cls.__new__(cls)
        d.ctx = ctx
        d.coeffs = coeffs
        d._hash = None
        return d

    @classmethod
    def zero(cls, ctx):
        z = RationalFunction.zero(ctx.n)
        return cls._raw(ctx, (z,) * ctx.n)

    @classmethod
    def partial(cls, ctx, i: int, coeff=1):
        """``coeff * d/dx_i`` with 1-based ``i``."""
        if not 1 <= i <= ctx.n:
            raise IndexError("variable index out of range")
        z = RationalFunction.zero(ctx.n)
        cs = [z] * ctx.n
        cs[i - 1] = _to_rf(ctx, coeff)
        return cls._raw(ctx, tuple(cs))

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def _check(self, other):
        if other.ctx != self.ctx:
            raise ValueError("derivations from different contexts")

    def __add__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        self._check(other)
        return Derivation._raw(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        self._check(other)
        return Derivation._raw(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Derivation._raw(self.ctx, tuple(-a for a in self.coeffs))

    def __mul__(self, r):
        if isinstance(r, (int, Fraction, RationalFunction)):
            return d_scale(r, self)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, r):
        if isinstance(r, (int, Fraction)):
            return d_scale(1 / Fraction(r), self)
        if isinstance(r, RationalFunction):
            return d_scale(r.inverse(), self)
        return NotImplemented

    def __call__(self, r):
        return d_apply(self, r)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"Derivation({format_derivation(self)!r})"

    def __str__(self):
        return format_derivation(self)


def _to_rf(ctx, c):
    if isinstance(c, RationalFunction):
        if c.nvars != ctx.n:
            raise ValueError("coefficient from a different context")
        return c
    return RationalFunction.constant(ctx.n, c)


def d_apply(D: Derivation, r: RationalFunction) -> RationalFunction:
    """``D(r) = sum_i f_i * dr/dx_i``."""
    total = RationalFunction.zero(D.ctx.n)
    for k, f in enumerate(D.coeffs):
        if f.is_zero():
            continue
        p = r.partial(k)
        if not p.is_zero():
            total = total + f * p
    return total


def d_scale(r, D: Derivation) -> Derivation:
    r = _to_rf(D.ctx, r)
    if r.is_zero():
        return Derivation.zero(D.ctx)
    return Derivation._raw(D.ctx, tuple(r * f for f in D.coeffs))


def d_bracket(D1: Derivation, D2: Derivation) -> Derivation:
    """Commutator; coefficient i is ``D1(g_i) - D2(f_i)``."""
    D1._check(D2)
    return Derivation._raw(
        D1.ctx,
        tuple(d_apply(D1, g) - d_apply(D2, f) for f, g in zip(D1.coeffs, D2.coeffs)),
    )


def bracket_lemma1_expand(a, D1: Derivation, b, D2: Derivation) -> Derivation:
    """``[aD1, bD2]`` via ``ab[D1,D2] + a D1(b) D2 - b D2(a) D1``.

    Kept independent of ``d_bracket`` applied to the scaled derivations so the
    two can be cross-checked.
    """
    D1._check(D2)
    a = _to_rf(D1.ctx, a)
    b = _to_rf(D1.ctx, b)
    return (
        d_scale(a * b, d_bracket(D1, D2))
        + d_scale(a * d_apply(D1, b), D2)
        - d_scale(b * d_apply(D2, a), D1)
    )


def format_derivation(D: Derivation) -> str:
    names = D.ctx.names
    parts = []
    for k, f in enumerate(D.coeffs):
        if f.is_zero():
            continue
        op = f"d/d{names[k]}"
        negative = False
        if f.is_polynomial() and f.num.is_monomial():
            (e, c), = f.num.terms.items()
            negative = c < 0
            coeff = format_polynomial(-f.num if negative else f.num, names)
            body = op if coeff == "1" else f"{coeff}*{op}"
        else:
            body = f"({format_rational(f, names)})*{op}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts) if parts else "0"
