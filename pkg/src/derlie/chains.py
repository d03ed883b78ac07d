"""Ideal chains with abelian quotients in nilpotent algebras of derivations.

``theorem1_chain`` builds ``0 = L_0 < L_1 < ... < L_n = L`` where ``n`` is
the rank of L over R: each step picks a central element ``D_s`` of
``L/L_{s-1}`` and sets ``L_s = (R D_1 + ... + R D_s) ∩ L``.
``verify_chain`` re-checks a chain from scratch using direct brackets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from derlie import linalg
from derlie.derivation import Derivation, d_bracket
from derlie.errors import DependentError, GuaranteeViolation, NotContainedError, NotNilpotentError
from derlie.liespan import (
    SpanBasis,
    StructureData,
    center_mod,
    check_ideal,
    is_nilpotent,
    k_reduce,
    rank_R,
    zero_span,
)
from derlie.ratfield import rf_lcm_denominator


def r_span_intersection(E, L: SpanBasis) -> SpanBasis:
    """Elements of ``L`` lying in the R-span of ``E``.

    A general element ``sum c_j b_j`` of L is reduced against the echelon
    form of E over R.  The residual is R-linear in the unknown rationals
    ``c_j``; clearing denominators and equating the coefficient of every
    monomial to zero gives a finite linear system over K.
    """
    E = list(E)
    if not E:
        raise ValueError("E must be nonempty")
    ctx = L.ctx
    n = ctx.n
    rows, pivots = linalg.rf_echelon([D.coeffs for D in E], n)
    if len(rows) != len(E):
        raise DependentError("generators are linearly dependent over R")
    d = L.dim
    if d == 0:
        return L
    free_cols = [i for i in range(n) if i not in pivots]
    # residual coordinate i of basis element j, for non-pivot i
    residuals = []
    for b in L.basis:
        res = list(b.coeffs)
        for row, p in zip(rows, pivots):
            c = b.coeffs[p]
            if c.is_zero():
                continue
            for i in free_cols:
                if not row[i].is_zero():
                    res[i] = res[i] - c * row[i]
        residuals.append(res)
    equations = []
    for i in free_cols:
        column = [residuals[j][i] for j in range(d)]
        den = rf_lcm_denominator(column, n)
        by_monomial: dict[tuple, list] = {}
        for j, f in enumerate(column):
            if f.is_zero():
                continue
            p = f.num * den.exact_div(f.den)
            for e, c in p.terms.items():
                by_monomial.setdefault(e, [Fraction(0)] * d)[j] = c
        equations.extend(by_monomial[e] for e in sorted(by_monomial))
    solutions = linalg.nullspace(equations, d) if equations else [
        [Fraction(int(t == j)) for t in range(d)] for j in range(d)
    ]
    return k_reduce([L.combination(v) for v in solutions], ctx)


def _require_subspace(big: SpanBasis, small: SpanBasis, what="subspace"):
    if not big.contains_span(small):
        raise NotContainedError(f"{what} is not contained in the algebra")


def quotient_rank(L: SpanBasis, I: SpanBasis) -> int:
    _require_subspace(L, I)
    return rank_R(L) - rank_R(I)


def r_basis(span: SpanBasis):
    """A subset of the K-basis of ``span`` that is a basis of its R-span."""
    chosen = []
    for b in span.basis:
        if rank_R(chosen + [b]) > len(chosen):
            chosen.append(b)
    return chosen


@dataclass
class ChainStep:
    span: SpanBasis
    generator: Derivation
    rank: int
    ideal: bool
    abelian_quotient: bool
    central: bool  # [L, D_s] inside L_{s-1}

    @property
    def ok(self):
        return self.ideal and self.abelian_quotient and self.central


@dataclass
class IdealChain:
    algebra: StructureData
    steps: list[ChainStep] = field(default_factory=list)

    @property
    def spans(self):
        """``[L_0, L_1, ..., L_n]``."""
        return [zero_span(self.algebra.ctx)] + [s.span for s in self.steps]

    @property
    def ranks(self):
        return [0] + [s.rank for s in self.steps]


def _brackets_inside(left, right, target: SpanBasis):
    for x in left:
        for y in right:
            if not target.contains(d_bracket(x, y)):
                return (x, y)
    return None


def theorem1_chain(sd: StructureData) -> IdealChain:
    if not is_nilpotent(sd):
        raise NotNilpotentError("algebra is not nilpotent")
    L = sd.span
    n = rank_R(L)
    if n < 1:
        raise ValueError("algebra has rank 0 over R")
    chain = IdealChain(sd)
    prev = zero_span(L.ctx)
    gens: list[Derivation] = []
    for s in range(1, n + 1):
        candidates = center_mod(sd, prev)
        D = next((z for z in candidates.basis if not prev.contains(z)), None)
        if D is None:
            raise GuaranteeViolation(f"construction guarantee violated: center of L/L_{s - 1} is zero")
        gens.append(D)
        cur = r_span_intersection(gens, L)
        r = rank_R(cur)
        if r != s:
            raise GuaranteeViolation(f"construction guarantee violated: rank of L_{s} is {r}, expected {s}")
        step = ChainStep(
            span=cur,
            generator=D,
            rank=r,
            ideal=check_ideal(sd, cur) is None,
            abelian_quotient=_brackets_inside(cur.basis, cur.basis, prev) is None,
            central=_brackets_inside(L.basis, [D], prev) is None,
        )
        if not step.ok:
            raise GuaranteeViolation(f"construction guarantee violated at step {s}")
        chain.steps.append(step)
        prev = cur
    if prev != L:
        raise GuaranteeViolation("construction guarantee violated: last chain term differs from L")
    return chain


@dataclass
class Check:
    name: str
    step: int | None
    passed: bool
    witness: str | None = None


@dataclass
class ChainReport:
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def add(self, name, step, witness=None):
        self.checks.append(Check(name, step, witness is None, witness))


def _bracket_witness(pair):
    if pair is None:
        return None
    x, y = pair
    return f"[{x}, {y}] = {d_bracket(x, y)}"


def verify_chain(sd: StructureData, chain: IdealChain, validate_saturation=True) -> ChainReport:
    """Independent re-check of every certificate of ``chain``.

    Uses direct brackets of derivations and fresh spans, never the flags
    stored in the chain.  ``validate_saturation`` also checks that each
    ``L_s`` equals ``R L_s ∩ L``, which the rank of a quotient presupposes.
    """
    report = ChainReport()
    L = sd.span
    ctx = L.ctx
    spans = [zero_span(ctx)] + [k_reduce(step.span.basis, ctx) for step in chain.steps]
    n = len(spans) - 1
    for s in range(1, n + 1):
        cur, prev = spans[s], spans[s - 1]
        D = chain.steps[s - 1].generator
        missing = next((b for b in prev.basis if not cur.contains(b)), None)
        if missing is None and cur.dim <= prev.dim:
            report.add("inclusion", s, "L_{s-1} equals L_s")
        else:
            report.add("inclusion", s, None if missing is None else f"{missing} not in L_{s}")
        outside = next((b for b in cur.basis if not L.contains(b)), None)
        report.add("in_algebra", s, None if outside is None else f"{outside} not in L")
        report.add("ideal", s, _bracket_witness(_brackets_inside(L.basis, cur.basis, cur)))
        r = rank_R(cur)
        report.add("rank", s, None if r == s else f"rank_R L_{s} = {r}")
        report.add("abelian_quotient", s, _bracket_witness(_brackets_inside(cur.basis, cur.basis, prev)))
        report.add("generator_in_step", s, None if cur.contains(D) else f"{D} not in L_{s}")
        report.add("central_generator", s, _bracket_witness(_brackets_inside(L.basis, [D], prev)))
        if validate_saturation:
            E = r_basis(cur)
            sat = r_span_intersection(E, L) if E else zero_span(ctx)
            report.add("saturated", s, None if sat == cur else f"R L_{s} ∩ L has dim {sat.dim}, L_{s} has dim {cur.dim}")
    report.add("top_is_L", n, None if spans[-1] == L else "L_n differs from L")
    if n >= 1:
        q = rank_R(L) - rank_R(spans[n - 1])
        report.add("top_quotient_rank", n, None if q == 1 else f"rank_R L/L_(n-1) = {q}")
    report.notes.append("dim_F FL/FL_(n-1) = 1 not machine-checked; rank_R L/L_(n-1) = 1 checked instead")
    return report
