"""Finite-dimensional K-spans of derivations and their Lie structure.

A ``SpanBasis`` is the canonical basis of a K-subspace of derivations.  To
decide K-linear relations, every vector is multiplied by one common
denominator (the monic lcm of all coefficient denominators) and read off as
a finite vector of rational numbers indexed by ``(coordinate, monomial)``.
The reduced row echelon form of that matrix is unique, which makes the
basis canonical.

Everything that only needs the bracket table (series, centers, ad
matrices) works on ``StructureData`` in coordinates relative to the basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from derlie import kernels, linalg
from derlie.derivation import Derivation, d_apply, d_bracket
from derlie.errors import NotAnIdealError, NotASubalgebraError, NotContainedError, DerlieError
from derlie.ratfield import Polynomial, RationalFunction, VarContext, rf_lcm_denominator, rf_normalize

DEFAULT_DIM_CAP = 512
DEFAULT_DEPTH_CAP = 64


@lru_cache(maxsize=None)
def _colkey(col):
    i, e = col
    return (i, sum(e), e)


class SpanBasis:
    """Canonical K-basis of a finite-dimensional space of derivations."""

    __slots__ = ("ctx", "basis", "denominator", "_rows", "_pivots")

    def __init__(self, ctx, basis, denominator, rows, pivots):
        self.ctx = ctx
        self.basis = tuple(basis)
        self.denominator = denominator
        self._rows = rows
        self._pivots = pivots

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __getitem__(self, i):
        return self.basis[i]

    def __eq__(self, other):
        if not isinstance(other, SpanBasis):
            return NotImplemented
        return self.ctx == other.ctx and self.basis == other.basis

    def __hash__(self):
        return hash((self.ctx, self.basis))

    def __repr__(self):
        return "SpanBasis([" + ", ".join(str(b) for b in self.basis) + "])"

    def coords(self, D: Derivation):
        """Coordinates of ``D`` in this basis, or ``None`` if ``D`` is outside."""
        vec = _to_vector(D, self.denominator)
        if vec is None:
            return None
        coords, residual = kernels.reduce_vector(vec, self._rows, self._pivots)
        if residual:
            return None
        return [Fraction(c) for c in coords]

    def contains(self, D: Derivation):
        return self.coords(D) is not None

    def __contains__(self, D):
        return self.contains(D)

    def contains_span(self, other: "SpanBasis"):
        return all(self.contains(b) for b in other.basis)

    def combination(self, coeffs) -> Derivation:
        out = Derivation.zero(self.ctx)
        for c, b in zip(coeffs, self.basis):
            if c:
                out = out + b * Fraction(c)
        return out


def _to_vector(D, den):
    vec = {}
    for i, f in enumerate(D.coeffs):
        if f.is_zero():
            continue
        q = den.divmod_exact(f.den) if not f.den.is_constant() else den
        if q is None:
            return None
        p = f.num * q
        for e, c in p.terms.items():
            vec[(i, e)] = c
    return vec


def _row_to_derivation(ctx, row, den):
    parts = [dict() for _ in range(ctx.n)]
    for (i, e), c in row.items():
        parts[i][e] = c
    return Derivation._raw(
        ctx, tuple(rf_normalize(Polynomial._raw(ctx.n, t), den) for t in parts)
    )


def k_reduce(vectors: Sequence[Derivation], ctx: VarContext | None = None) -> SpanBasis:
    """Canonical basis of the K-span of ``vectors``."""
    vectors = list(vectors)
    if ctx is None:
        if not vectors:
            raise ValueError("k_reduce of an empty list needs a context")
        ctx = vectors[0].ctx
    den = rf_lcm_denominator((f for D in vectors for f in D.coeffs), ctx.n)
    sparse = [_to_vector(D, den) for D in vectors]
    rows, pivots = kernels.rref(sparse, _colkey)
    basis = [_row_to_derivation(ctx, r, den) for r in rows]
    return SpanBasis(ctx, basis, den, rows, pivots)


def zero_span(ctx):
    return k_reduce([], ctx)


# closure

@dataclass
class ClosureOutcome:
    status: str  # "closed" or "indeterminate"
    span: SpanBasis
    iterations: int
    history: list = field(default_factory=list)
    reason: str | None = None

    @property
    def closed(self):
        return self.status == "closed"


def _cancelled(cancel):
    if cancel is None:
        return False
    if hasattr(cancel, "is_set"):
        return cancel.is_set()
    return bool(cancel())


def closure(generators, dim_cap=DEFAULT_DIM_CAP, depth_cap=DEFAULT_DEPTH_CAP, cancel=None, ctx=None) -> ClosureOutcome:
    """Lie subalgebra generated by ``generators``.

    Each round brackets the whole current basis with the elements added in
    the previous round.  Stops with ``indeterminate`` when the dimension
    passes ``dim_cap``, the round count passes ``depth_cap``, or ``cancel``
    (an ``Event``-like object or a callable) is set; it never truncates
    silently.
    """
    if dim_cap < 1 or depth_cap < 1:
        raise ValueError("caps must be positive")
    span = k_reduce(generators, ctx)
    history = [span.dim]
    fresh = list(span.basis)
    rounds = 0
    while True:
        if span.dim > dim_cap:
            return ClosureOutcome("indeterminate", span, rounds, history, "dim_cap")
        if _cancelled(cancel):
            return ClosureOutcome("indeterminate", span, rounds, history, "cancelled")
        if rounds >= depth_cap:
            return ClosureOutcome("indeterminate", span, rounds, history, "depth_cap")
        rounds += 1
        new, pending = [], []
        grown = span
        batch = max(4, span.dim // 4)
        for b in span.basis:
            for f in fresh:
                br = d_bracket(b, f)
                if br.is_zero() or grown.contains(br):
                    continue
                pending.append(br)
                if len(pending) >= batch:
                    # fold in early so duplicates are filtered and the cap trips promptly
                    grown = k_reduce(list(grown.basis) + pending, span.ctx)
                    new += pending
                    pending = []
                    if grown.dim > dim_cap:
                        history.append(grown.dim)
                        return ClosureOutcome("indeterminate", grown, rounds, history, "dim_cap")
        if pending:
            grown = k_reduce(list(grown.basis) + pending, span.ctx)
            new += pending
        if not new:
            return ClosureOutcome("closed", span, rounds, history)
        fresh = new
        span = grown
        history.append(span.dim)


# rank over R

def rank_R(span) -> int:
    """Dimension over R of the R-span (matrix rank over K(x1..xn))."""
    vectors = list(span.basis if isinstance(span, SpanBasis) else span)
    if not vectors:
        return 0
    rows, _ = linalg.rf_echelon([D.coeffs for D in vectors], vectors[0].ctx.n)
    return len(rows)


# structure constants

@dataclass(frozen=True)
class StructureData:
    span: SpanBasis
    constants: tuple  # constants[i][j][k]: [b_i, b_j] = sum_k c * b_k

    @property
    def dim(self):
        return self.span.dim

    @property
    def ctx(self):
        return self.span.ctx

    def bracket(self, u, v):
        """Bracket of two coordinate vectors."""
        d = self.dim
        out = [Fraction(0)] * d
        c = self.constants
        for i in range(d):
            if not u[i]:
                continue
            for j in range(d):
                if not v[j] or i == j:
                    continue
                s = u[i] * v[j]
                row = c[i][j]
                for k in range(d):
                    if row[k]:
                        out[k] += s * row[k]
        return out

    def unit(self, i):
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def to_span(self, vectors) -> SpanBasis:
        return k_reduce([self.span.combination(v) for v in vectors], self.ctx)

    def coords_of(self, D):
        return self.span.coords(D)


def structure_constants(span: SpanBasis) -> StructureData:
    d = span.dim
    zero = (Fraction(0),) * d
    c = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            br = d_bracket(span.basis[i], span.basis[j])
            co = span.coords(br)
            if co is None:
                raise NotASubalgebraError("span not a subalgebra")
            c[i][j] = tuple(co)
            c[j][i] = tuple(-x for x in co)
    return StructureData(span, tuple(tuple(r) for r in c))


def _bracket_space(sd, left, right):
    return linalg.row_basis([sd.bracket(u, v) for u in left for v in right], sd.dim)


def _lcs_coords(sd):
    units = [sd.unit(i) for i in range(sd.dim)]
    series = [units]
    while series[-1]:
        nxt = _bracket_space(sd, units, series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def _derived_coords(sd):
    series = [[sd.unit(i) for i in range(sd.dim)]]
    while series[-1]:
        nxt = _bracket_space(sd, series[-1], series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def lower_central_series(sd: StructureData) -> list[SpanBasis]:
    """``[L, [L,L], [L,[L,L]], ...]`` ending at 0 or at the first repeated term."""
    return [sd.to_span(t) for t in _lcs_coords(sd)]


def derived_series(sd: StructureData) -> list[SpanBasis]:
    return [sd.to_span(t) for t in _derived_coords(sd)]


def nilpotency_class(sd: StructureData) -> int | None:
    """Number of nonzero lower central terms, or ``None`` if not nilpotent."""
    series = _lcs_coords(sd)
    if series[-1]:
        return None
    return len(series) - 1


def is_nilpotent(sd: StructureData) -> bool:
    return nilpotency_class(sd) is not None


def _center_coords(sd):
    d = sd.dim
    c = sd.constants
    eqs = [[c[i][j][k] for i in range(d)] for j in range(d) for k in range(d)]
    return linalg.nullspace(eqs, d)


def center(sd: StructureData) -> SpanBasis:
    return sd.to_span(_center_coords(sd))


def _ideal_coords(sd, I: SpanBasis):
    coords = []
    for b in I.basis:
        co = sd.span.coords(b)
        if co is None:
            raise NotContainedError(f"{b} is not in the algebra")
        coords.append(co)
    return coords


def check_ideal(sd: StructureData, I: SpanBasis):
    """Return ``None`` if ``I`` is an ideal of ``sd``, else a witness pair."""
    icoords = _ideal_coords(sd, I)
    space = linalg.CoordSpace(icoords, sd.dim)
    for j in range(sd.dim):
        e = sd.unit(j)
        for t, u in enumerate(icoords):
            if not space.contains(sd.bracket(e, u)):
                return (sd.span.basis[j], I.basis[t])
    return None


def center_mod(sd: StructureData, I: SpanBasis) -> SpanBasis:
    """Preimage in L of the center of L/I."""
    witness = check_ideal(sd, I)
    if witness is not None:
        x, y = witness
        raise NotAnIdealError(f"[{x}, {y}] = {d_bracket(x, y)} leaves the subspace", witness)
    return sd.to_span(_center_mod_coords(sd, _ideal_coords(sd, I)))


def _center_mod_coords(sd, icoords):
    d = sd.dim
    space = linalg.CoordSpace(icoords, d)
    c = sd.constants
    free = [k for k in range(d) if k not in set(space.pivots)]
    eqs = []
    for j in range(d):
        # images of the unit vectors under x -> [x, b_j], reduced modulo I
        images = [space.residual(list(c[i][j])) for i in range(d)]
        for k in free:
            eqs.append([images[i].get(k, 0) for i in range(d)])
    return linalg.nullspace(eqs, d)


def ad_matrix(sd: StructureData, i: int):
    """Matrix of ``ad b_i = [b_i, -]``; column j holds the coordinates of ``[b_i, b_j]``."""
    d = sd.dim
    c = sd.constants[i]
    return [[c[j][k] for j in range(d)] for k in range(d)]


def common_kernel(ops):
    """First canonical nonzero vector killed by pairwise commuting nilpotent matrices."""
    ops = [[[Fraction(x) for x in row] for row in m] for m in ops]
    if not ops:
        raise ValueError("need at least one operator")
    d = len(ops[0])
    if d == 0:
        raise ValueError("zero-dimensional space has no nonzero vector")
    for m in ops:
        if len(m) != d or any(len(r) != d for r in m):
            raise ValueError("operators must be square of one common size")
    for a in range(len(ops)):
        if not linalg.is_nilpotent_matrix(ops[a]):
            raise ValueError(f"operator {a} is not nilpotent")
        for b in range(a + 1, len(ops)):
            if linalg.matmul(ops[a], ops[b]) != linalg.matmul(ops[b], ops[a]):
                raise ValueError(f"operators {a} and {b} do not commute")
    stacked = [row for m in ops for row in m]
    basis = linalg.nullspace(stacked, d)
    if not basis:
        raise DerlieError("no common kernel vector for commuting nilpotent operators")
    return basis[0]


def constants_membership(span, r: RationalFunction) -> bool:
    """True iff every basis derivation kills ``r``."""
    return all(d_apply(b, r).is_zero() for b in span)
