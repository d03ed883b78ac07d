"""Constructors for the classified nilpotent families and their axiom checks.

Infinite families are represented by finite truncations that are closed
under the bracket.  The default model takes ``D_i = d/dx_i``, ``a = x3``
and ``b = x2`` (``a = x2`` for the rank-2 family); a custom ``Model`` may
replace any of them and is verified rather than trusted.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial

from derlie.derivation import Derivation, d_apply, d_bracket
from derlie.liespan import (
    DEFAULT_DEPTH_CAP,
    DEFAULT_DIM_CAP,
    SpanBasis,
    closure,
    k_reduce,
    nilpotency_class,
    rank_R,
    structure_constants,
)
from derlie.ratfield import Polynomial, RationalFunction, VarContext

KINDS = ("un", "rank2", "rank3t1", "rank3t2", "thm2t2", "thm2t3", "example1")

_PARAMS = {
    "un": {"n": 3, "d": 1},
    "rank2": {"k": 1},
    "rank3t1": {"k": 1},
    "rank3t2": {"n": 1, "m": 1},
    "thm2t2": {"k": 1},
    "thm2t3": {"k": 1, "m": 1},
    "example1": {},
}

NOMINAL_RANK = {"rank2": 2, "rank3t1": 3, "rank3t2": 3, "thm2t2": 3, "thm2t3": 3, "example1": 3}


@dataclass(frozen=True)
class Model:
    """Concrete derivations ``D1, D2, D3`` and functions ``a``, ``b``."""

    ctx: VarContext
    d1: Derivation
    d2: Derivation
    d3: Derivation | None
    a: RationalFunction
    b: RationalFunction | None = None


def default_model(ctx: VarContext | None = None, rank: int = 3) -> Model:
    ctx = ctx or VarContext(rank)
    if ctx.n < rank:
        raise ValueError(f"model needs at least {rank} variables")
    D = [Derivation.partial(ctx, i) for i in range(1, rank + 1)]
    if rank == 2:
        return Model(ctx, D[0], D[1], None, RationalFunction.var(ctx.n, 1))
    return Model(ctx, D[0], D[1], D[2], RationalFunction.var(ctx.n, 2), RationalFunction.var(ctx.n, 1))


def _divided_power(r: RationalFunction, i: int) -> RationalFunction:
    return (r ** i) * Fraction(1, factorial(i))


def build_un_truncated(n: int, d: int, ctx: VarContext | None = None) -> SpanBasis:
    """Monomial triangular derivations ``x^α d/dx_i`` with α on x_{i+1..n}, deg α ≤ d."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    ctx = ctx or VarContext(n)
    vectors = []
    for i in range(1, n + 1):
        for alpha in _exponents(n - i, d if i < n else 0):
            e = (0,) * i + alpha + (0,) * (ctx.n - n)
            mono = RationalFunction.from_poly(Polynomial.monomial(ctx.n, e))
            vectors.append(Derivation.partial(ctx, i, mono))
    return k_reduce(vectors, ctx)


def _exponents(nv, d):
    if nv == 0:
        yield ()
        return
    for first in range(d + 1):
        for rest in _exponents(nv - 1, d - first):
            yield (first,) + rest


def build_rank2_family(k: int, model: Model | None = None) -> SpanBasis:
    if k < 0:
        raise ValueError("need k >= 0")
    model = model or default_model(rank=2)
    vectors = [model.d2] + [_divided_power(model.a, i) * model.d1 for i in range(k + 1)]
    return k_reduce(vectors, model.ctx)


def build_rank3_type1(k: int, model: Model | None = None) -> SpanBasis:
    if k < 0:
        raise ValueError("need k >= 0")
    model = model or default_model()
    vectors = [model.d3]
    vectors += [_divided_power(model.a, i) * model.d1 for i in range(k + 1)]
    vectors += [_divided_power(model.a, i) * model.d2 for i in range(k + 1)]
    return k_reduce(vectors, model.ctx)


def type2_index_set(k: int, m: int, closed: bool = True):
    """Index pairs ``(i, j)`` of the ``a^i b^j/(i! j!) D1`` terms.

    The literal box ``i <= k, j <= m`` is not bracket-closed as soon as
    ``k, m >= 1``: ``[a D2, a b D1] = a^2 D1``.  With ``closed`` the box is
    replaced by its closure ``{(i, j): j <= m, i + k*j <= k*(m + 1)}``.
    """
    if not closed:
        return [(i, j) for i in range(k + 1) for j in range(m + 1)]
    return [(i, j) for j in range(m + 1) for i in range(k * (m + 1 - j) + 1)]


def build_rank3_type2(n: int, m: int, model: Model | None = None, closed: bool = True) -> SpanBasis:
    if n < 0 or m < 0:
        raise ValueError("need n >= 0 and m >= 0")
    model = model or default_model()
    a, b = model.a, model.b
    vectors = [model.d3]
    vectors += [_divided_power(a, i) * model.d2 for i in range(n + 1)]
    vectors += [(_divided_power(a, i) * _divided_power(b, j)) * model.d1 for i, j in type2_index_set(n, m, closed)]
    return k_reduce(vectors, model.ctx)


def build_thm2_family(type_: int, k: int, m: int = 0, model: Model | None = None, closed: bool = True) -> SpanBasis:
    if type_ == 2:
        return build_rank3_type1(k, model)
    if type_ == 3:
        return build_rank3_type2(k, m, model, closed)
    raise ValueError("type must be 2 or 3")


def build_example1(ctx: VarContext | None = None) -> SpanBasis:
    ctx = ctx or VarContext(3)
    return k_reduce(
        [Derivation.partial(ctx, i, RationalFunction.var(ctx.n, i - 1)) for i in (1, 2, 3)], ctx
    )


# specs

@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: dict = field(default_factory=dict)
    model: Model | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family {self.kind!r}")
        unknown = set(self.params) - set(_PARAMS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameter(s) {sorted(unknown)} for {self.kind}")
        merged = dict(_PARAMS[self.kind])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)

    @property
    def nvars(self):
        if self.kind == "un":
            return self.params["n"]
        return 2 if self.kind == "rank2" else 3

    @property
    def nominal_rank(self):
        return self.params["n"] if self.kind == "un" else NOMINAL_RANK[self.kind]

    def label(self):
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())

    def with_model(self, model):
        return replace(self, model=model)

    def resolved_model(self, ctx=None):
        if self.model is not None:
            return self.model
        if self.kind in ("un", "example1"):
            return None
        return default_model(ctx, 2 if self.kind == "rank2" else 3)


_SPEC_RE = re.compile(r"^([a-z0-9]+)(?::(.*))?$")


def parse_family(text: str) -> FamilySpec:
    """Parse ``kind[:key=value,...]``, e.g. ``thm2t3:k=2,m=2``."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad family spec {text!r}")
    kind, rest = m.group(1), m.group(2)
    params = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep or not value.strip().lstrip("-").isdigit():
                raise ValueError(f"bad family parameter {item!r}")
            params[key.strip()] = int(value)
    return FamilySpec(kind, params)


def build_family(spec: FamilySpec, ctx: VarContext | None = None, closed: bool = True) -> SpanBasis:
    p = spec.params
    model = spec.resolved_model(ctx)
    if spec.kind == "un":
        return build_un_truncated(p["n"], p["d"], ctx)
    if spec.kind == "rank2":
        return build_rank2_family(p["k"], model)
    if spec.kind in ("rank3t1", "thm2t2"):
        return build_rank3_type1(p["k"], model)
    if spec.kind == "rank3t2":
        return build_rank3_type2(p["n"], p["m"], model, closed)
    if spec.kind == "thm2t3":
        return build_rank3_type2(p["k"], p["m"], model, closed)
    return build_example1(ctx)


@dataclass
class FamilyReport:
    spec: FamilySpec
    dim: int
    closure_status: str
    closure_added: int
    nilpotency_class: int | None
    rank: int
    axioms: list = field(default_factory=list)  # (name, passed)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return (
            all(p for _, p in self.axioms)
            and self.closure_status == "closed"
            and self.closure_added == 0
            and self.nilpotency_class is not None
            and self.rank == self.spec.nominal_rank
        )


def _axioms(spec: FamilySpec, basis: SpanBasis, model: Model | None):
    out = []
    if spec.kind == "un":
        n = spec.params["n"]
        for D in basis:
            ok = True
            for i, f in enumerate(D.coeffs[:n]):
                if f.is_zero():
                    continue
                allowed = set(range(i + 1, n))
                if not f.is_polynomial() or not f.num.variables() <= allowed:
                    ok = False
            out.append((f"triangular {D}", ok))
        return out
    if spec.kind == "example1":
        out.append(("abelian", all(d_bracket(x, y).is_zero() for x in basis for y in basis)))
        return out
    zero = lambda r: r.is_zero()
    one = lambda r: r == 1
    a, b = model.a, model.b
    out.append(("D_1(a)=0", zero(d_apply(model.d1, a))))
    out.append(("D_2(a)=1" if spec.kind == "rank2" else "D_2(a)=0",
                (one if spec.kind == "rank2" else zero)(d_apply(model.d2, a))))
    if spec.kind == "rank2":
        out.append(("[D_1,D_2]=0", d_bracket(model.d1, model.d2).is_zero()))
        return out
    out.append(("D_3(a)=1", one(d_apply(model.d3, a))))
    if spec.kind in ("rank3t2", "thm2t3"):
        out.append(("D_1(b)=0", zero(d_apply(model.d1, b))))
        out.append(("D_3(b)=0", zero(d_apply(model.d3, b))))
        out.append(("D_2(b)=1", one(d_apply(model.d2, b))))
    Ds = [model.d1, model.d2, model.d3]
    for i in range(3):
        for j in range(i + 1, 3):
            out.append((f"[D_{i + 1},D_{j + 1}]=0", d_bracket(Ds[i], Ds[j]).is_zero()))
    return out


def verify_family_axioms(spec: FamilySpec, ctx: VarContext | None = None,
                         dim_cap=DEFAULT_DIM_CAP, depth_cap=DEFAULT_DEPTH_CAP) -> FamilyReport:
    """Check the side conditions of ``spec``'s model, then closure, nilpotency and rank."""
    model = spec.resolved_model(ctx)
    basis = build_family(spec, ctx if model is None else model.ctx)
    axioms = _axioms(spec, basis, model)
    outcome = closure(basis.basis, dim_cap, depth_cap, ctx=basis.ctx)
    cls = None
    if outcome.closed:
        cls = nilpotency_class(structure_constants(outcome.span))
    report = FamilyReport(
        spec=spec,
        dim=basis.dim,
        closure_status=outcome.status,
        closure_added=outcome.span.dim - basis.dim,
        nilpotency_class=cls,
        rank=rank_R(basis),
        axioms=axioms,
    )
    if spec.kind in ("thm2t2", "thm2t3", "example1"):
        report.notes.append("maximality not machine-checked")
    return report
