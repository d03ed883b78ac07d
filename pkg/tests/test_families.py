from fractions import Fraction

import pytest

from derlie.derivation import Derivation, d_bracket
from derlie.families import (
    FamilySpec,
    Model,
    build_example1,
    build_family,
    build_rank2_family,
    build_rank3_type1,
    build_rank3_type2,
    build_thm2_family,
    build_un_truncated,
    default_model,
    parse_family,
    type2_index_set,
    verify_family_axioms,
)
from derlie.liespan import closure, is_nilpotent, k_reduce, nilpotency_class, rank_R, structure_constants
from derlie.parsing import parse_derivation
from derlie.ratfield import RationalFunction, VarContext


def spanned(ctx, *texts):
    return k_reduce([parse_derivation(t, ctx) for t in texts], ctx)


C2, C3 = VarContext(2), VarContext(3)


def closed_without_additions(span):
    out = closure(span.basis)
    return out.closed and out.span == span


def test_un_examples():
    for d in range(4):
        assert build_un_truncated(1, d).basis == (Derivation.partial(VarContext(1), 1),)
    assert build_un_truncated(2, 1) == spanned(C2, "d/dx1", "x2*d/dx1", "d/dx2")
    assert build_un_truncated(3, 1) == spanned(C3, "d/dx1", "x2*d/dx1", "x3*d/dx1", "d/dx2", "x3*d/dx2", "d/dx3")


@pytest.mark.parametrize("n, d", [(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 1)])
def test_un_small_truncations_are_closed_and_graded(n, d):
    span = build_un_truncated(n, d)
    assert closed_without_additions(span)
    sd = structure_constants(span)
    assert is_nilpotent(sd) and rank_R(span) == n


def test_un_larger_truncations_are_not_closed():
    # [x3*d/dx2, x2^2*d/dx1] = 2*x2*x3*d/dx1 is fine, but [x3^2*d/dx2, x2^2*d/dx1] has degree 3
    out = closure(build_un_truncated(3, 2).basis)
    assert not (out.closed and out.span == build_un_truncated(3, 2))


def test_rank2_examples():
    s0 = build_rank2_family(0)
    assert s0 == spanned(C2, "d/dx2", "d/dx1") and nilpotency_class(structure_constants(s0)) == 1
    s1 = build_rank2_family(1)
    assert s1 == spanned(C2, "d/dx2", "d/dx1", "x2*d/dx1") and nilpotency_class(structure_constants(s1)) == 2
    s2 = build_rank2_family(2)
    assert s2.dim == 4
    half_a2 = parse_derivation("1/2*x2^2*d/dx1", C2)
    assert half_a2 in s2
    assert d_bracket(parse_derivation("d/dx2", C2), half_a2) == parse_derivation("x2*d/dx1", C2)


def test_rank3_type1_examples():
    s1 = build_rank3_type1(1)
    assert s1 == spanned(C3, "d/dx3", "d/dx1", "x3*d/dx1", "d/dx2", "x3*d/dx2")
    assert nilpotency_class(structure_constants(s1)) == 2
    s2 = build_rank3_type1(2)
    assert s2.dim == 7 and nilpotency_class(structure_constants(s2)) == 3
    for k in range(4):
        assert rank_R(build_rank3_type1(k)) == 3
        assert build_rank3_type1(k).dim == 2 * (k + 1) + 1


def test_rank3_type2_examples():
    assert build_rank3_type2(0, 1) == spanned(C3, "d/dx3", "d/dx2", "d/dx1", "x2*d/dx1")
    literal = build_rank3_type2(1, 1, closed=False)
    assert literal.dim == 7
    assert build_rank3_type2(1, 1).dim == 8


def test_literal_box_is_not_closed_and_closes_to_default():
    for k, m in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        literal = build_rank3_type2(k, m, closed=False)
        out = closure(literal.basis)
        assert out.closed and out.span.dim > literal.dim
        assert out.span == build_rank3_type2(k, m)
    a, b, D2 = (parse_derivation(t, C3) for t in ("x3*d/dx2", "x3*x2*d/dx1", "d/dx2"))
    assert d_bracket(a, b) == parse_derivation("x3^2*d/dx1", C3)
    assert D2 in build_rank3_type2(1, 1)


def test_closed_index_set_is_down_set():
    for k in range(4):
        for m in range(4):
            idx = set(type2_index_set(k, m))
            assert set(type2_index_set(k, m, closed=False)) <= idx
            for i, j in idx:
                assert (i - 1, j) in idx or i == 0
                assert (i, j - 1) in idx or j == 0
                # [a^s/s! D2, a^i b^j/(i! j!) D1] produces index (i + s, j - 1)
                if j:
                    assert all((i + s, j - 1) in idx for s in range(k + 1))


def test_thm2_examples():
    assert build_thm2_family(2, 1, 0) == build_rank3_type1(1)
    literal = build_thm2_family(3, 1, 1, closed=False)
    assert literal == spanned(C3, "d/dx3", "d/dx2", "x3*d/dx2", "d/dx1", "x3*d/dx1", "x2*d/dx1", "x3*x2*d/dx1")
    s00 = build_thm2_family(3, 0, 0)
    assert s00 == spanned(C3, "d/dx3", "d/dx2", "d/dx1")
    assert all(d_bracket(x, y).is_zero() for x in s00 for y in s00)
    with pytest.raises(ValueError):
        build_thm2_family(4, 1)


def test_example1():
    s = build_example1()
    assert s == spanned(C3, "x1*d/dx1", "x2*d/dx2", "x3*d/dx3")
    assert rank_R(s) == 3
    assert all(d_bracket(x, y).is_zero() for x in s for y in s)
    assert nilpotency_class(structure_constants(s)) == 1


def test_factorials_are_exact():
    s = build_rank3_type2(2, 2)
    assert parse_derivation("1/4*x3^2*x2^2*d/dx1", C3) in s
    assert parse_derivation("1/2*x3^2*d/dx2", C3) in s


@pytest.mark.parametrize("text", ["un:n=3,d=1", "rank2:k=3", "rank3t1:k=2", "rank3t2:n=2,m=2",
                                  "thm2t2:k=3", "thm2t3:k=2,m=2", "example1"])
def test_default_models_pass_every_check(text):
    rep = verify_family_axioms(parse_family(text))
    assert rep.ok, rep
    assert rep.closure_added == 0 and rep.closure_status == "closed"
    assert rep.rank == rep.spec.nominal_rank


def test_maximality_is_flagged():
    rep = verify_family_axioms(parse_family("thm2t3:k=1,m=1"))
    assert "maximality not machine-checked" in rep.notes


def test_corrupted_model_fails_named_axiom():
    base = default_model()
    bad = Model(base.ctx, base.d1, base.d2, base.d3, RationalFunction.var(3, 0), base.b)
    rep = verify_family_axioms(FamilySpec("rank3t1", {"k": 1}, bad))
    failed = [name for name, ok in rep.axioms if not ok]
    assert "D_1(a)=0" in failed and not rep.ok


def test_shifting_a_by_constant_keeps_axioms():
    base = default_model()
    for c in (Fraction(1), Fraction(-3, 2)):
        shifted = Model(base.ctx, base.d1, base.d2, base.d3, base.a + RationalFunction.constant(3, c), base.b)
        for kind, params in [("rank3t1", {"k": 2}), ("thm2t3", {"k": 1, "m": 1})]:
            rep = verify_family_axioms(FamilySpec(kind, params, shifted))
            assert all(ok for _, ok in rep.axioms) and rep.ok


def test_alternative_model_is_verified():
    # D1 = d/dx1, D2 = d/dx2 + x3*d/dx1 does not commute with D3 = d/dx3
    ctx = C3
    d1 = parse_derivation("d/dx1", ctx)
    d2 = parse_derivation("d/dx2 + x3*d/dx1", ctx)
    d3 = parse_derivation("d/dx3", ctx)
    model = Model(ctx, d1, d2, d3, RationalFunction.var(3, 2), RationalFunction.var(3, 1))
    rep = verify_family_axioms(FamilySpec("rank3t1", {"k": 1}, model))
    assert dict(rep.axioms)["[D_2,D_3]=0"] is False


def test_truncation_coherence():
    for k in range(3):
        for m in range(3):
            small, big = build_rank3_type2(k, m), build_rank3_type2(k + 1, m + 1)
            assert all(b in big for b in small)
    for k in range(3):
        assert all(b in build_rank3_type1(k + 1) for b in build_rank3_type1(k))
        assert all(b in build_rank2_family(k + 1) for b in build_rank2_family(k))


def test_parse_family():
    spec = parse_family("thm2t3:k=2,m=2")
    assert spec.kind == "thm2t3" and spec.params == {"k": 2, "m": 2}
    assert parse_family("rank2").params == {"k": 1}
    assert parse_family("un:n=3,d=2").label() == "un:n=3,d=2"
    for bad in ["nope", "rank2:q=1", "rank2:k", "rank2:k=x", "Rank2"]:
        with pytest.raises(ValueError):
            parse_family(bad)


def test_build_family_dispatch():
    assert build_family(parse_family("thm2t2:k=1")) == build_rank3_type1(1)
    assert build_family(parse_family("example1")) == build_example1()
    assert build_family(parse_family("rank3t2:n=1,m=1"), closed=False).dim == 7
