import random
import threading
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CTX3, nilpotent_population, random_derivation, random_rf
from derlie.derivation import Derivation, d_bracket
from derlie.errors import NotAnIdealError, NotASubalgebraError
from derlie.families import build_rank3_type1
from derlie.linalg import is_nilpotent_matrix, matmul, matvec
from derlie.liespan import (
    ad_matrix,
    center,
    center_mod,
    check_ideal,
    closure,
    common_kernel,
    constants_membership,
    derived_series,
    is_nilpotent,
    k_reduce,
    lower_central_series,
    nilpotency_class,
    rank_R,
    structure_constants,
    zero_span,
)
from derlie.parsing import parse_derivation, parse_rational

POP = nilpotent_population(seed=77, count=40)
X = sp.symbols("x1:4")


def D(text):
    return parse_derivation(text, CTX3)


def span(*texts):
    return k_reduce([D(t) for t in texts], CTX3)


def sd_of(*texts):
    return structure_constants(span(*texts))


H = ("d/dx1", "x2*d/dx1", "d/dx2")  # the 3-dimensional nilpotent example
B = ("d/dx1", "x1*d/dx1")  # non-nilpotent control


# k_reduce

def test_k_reduce_examples():
    s = span("d/dx1", "2*d/dx1")
    assert s.dim == 1 and s.basis == (D("d/dx1"),)
    assert span(*B).dim == 2
    assert zero_span(CTX3).dim == 0
    assert span("0").dim == 0


def test_basis_order_is_canonical():
    assert span("d/dx2", "x2*d/dx1 + d/dx1", "d/dx1").basis == tuple(D(t) for t in H)


def test_coords_and_membership():
    s = span(*H)
    assert s.coords(D("3*d/dx1 - x2*d/dx1 + 1/2*d/dx2")) == [3, -1, Fraction(1, 2)]
    assert D("x1*d/dx1") not in s
    assert D("1/x2*d/dx1") not in s


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_k_reduce_canonical(seed):
    rng = random.Random(seed)
    gens = [random_derivation(rng, num_deg=2, den_deg=1) for _ in range(rng.randint(1, 4))]
    combos = []
    for _ in range(len(gens) + 1):
        c = Derivation.zero(CTX3)
        for g in gens:
            c = c + g * rng.randint(-2, 2)
        combos.append(c)
    a = k_reduce(gens, CTX3)
    b = k_reduce(gens[::-1] + combos, CTX3)
    assert a == b and a.basis == b.basis
    assert k_reduce(a.basis, CTX3) == a


# closure

def test_closure_examples():
    out = closure([D("d/dx1")])
    assert out.closed and out.span.dim == 1
    out = closure([D("d/dx2"), D("x2*d/dx1")])
    assert out.closed and out.span.dim == 3 and D("d/dx1") in out.span
    out = closure([D(t) for t in B])
    assert out.closed and out.span.dim == 2


def test_closure_reports_caps():
    gens = [D("d/dx1"), D("x1^3*d/dx1")]
    out = closure(gens, dim_cap=10)
    assert out.status == "indeterminate" and out.reason == "dim_cap" and out.span.dim > 10
    out = closure(gens, depth_cap=2)
    assert out.status == "indeterminate" and out.reason == "depth_cap"
    assert out.history[0] == 2 and out.history == sorted(out.history)


def test_closure_cancellation():
    ev = threading.Event()
    ev.set()
    out = closure([D("d/dx1"), D("x1^3*d/dx1")], cancel=ev)
    assert out.reason == "cancelled"
    calls = []
    out = closure([D("d/dx1"), D("x1^3*d/dx1")], cancel=lambda: calls.append(1) or len(calls) > 2)
    assert out.reason == "cancelled" and out.iterations == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_closure_soundness(seed):
    rng = random.Random(seed)
    gens = [Derivation.partial(CTX3, rng.randint(1, 3), parse_rational(rng.choice(["1", "x2", "x3", "x2*x3", "x3^2"]), CTX3))
            for _ in range(rng.randint(1, 3))]
    out = closure(gens, dim_cap=40)
    if out.closed:
        for a in out.span:
            for b in out.span:
                assert d_bracket(a, b) in out.span
        for g in gens:
            assert g in out.span


# rank over R

def _sympy_rank(s):
    def conv(r):
        num = sum(sp.Rational(c.numerator, c.denominator) * sp.Mul(*[x ** e for x, e in zip(X, ex)])
                  for ex, c in r.num.terms.items())
        den = sum(sp.Rational(c.numerator, c.denominator) * sp.Mul(*[x ** e for x, e in zip(X, ex)])
                  for ex, c in r.den.terms.items())
        return num / den
    if not s.basis:
        return 0
    return sp.Matrix([[conv(f) for f in b.coeffs] for b in s.basis]).rank(simplify=True)


def test_rank_examples():
    ex = span("x1*d/dx1", "x2*d/dx2", "x3*d/dx3")
    assert rank_R(ex) == 3
    assert rank_R(span(*B)) == 1
    assert rank_R(span("d/dx1", "d/dx2", "x1*d/dx1 + x2*d/dx2")) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_against_sympy(seed):
    rng = random.Random(seed)
    base = [random_derivation(rng, num_deg=1, den_deg=1) for _ in range(rng.randint(1, 3))]
    vectors = base + [d * random_rf(rng, num_deg=1, den_deg=1) for d in base[: rng.randint(0, 2)]]
    s = k_reduce(vectors, CTX3)
    r = rank_R(s)
    assert r == _sympy_rank(s)
    assert r <= min(s.dim, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_invariant_under_rescaling(seed):
    rng = random.Random(seed)
    vectors = [random_derivation(rng, num_deg=1, den_deg=1) for _ in range(rng.randint(1, 4))]
    r = rank_R(vectors)
    assert rank_R(k_reduce(vectors, CTX3)) == r
    scaled = [v * f for v in vectors for f in [random_rf(rng, num_deg=1, den_deg=1)] if not f.is_zero()]
    if len(scaled) == len(vectors):
        assert rank_R(scaled) == r


# structure constants and series

def test_structure_constants_examples():
    ab = sd_of("x1*d/dx1", "x2*d/dx2")
    assert all(not any(c) for row in ab.constants for c in row)
    b = sd_of(*B)
    assert b.constants[0][1] == (1, 0)  # [d/dx1, x1*d/dx1] = d/dx1
    h = sd_of(*H)
    assert h.constants[2][1] == (1, 0, 0)  # [d/dx2, x2*d/dx1] = d/dx1
    nonzero = {(i, j) for i in range(3) for j in range(3) if any(h.constants[i][j])}
    assert nonzero == {(1, 2), (2, 1)}


def test_structure_constants_require_closure():
    with pytest.raises(NotASubalgebraError, match="span not a subalgebra"):
        sd_of("d/dx2", "x2*d/dx1")


def test_series_examples():
    assert [s.dim for s in lower_central_series(sd_of("x1*d/dx1", "x2*d/dx2", "x3*d/dx3"))] == [3, 0]
    h = sd_of(*H)
    lcs = lower_central_series(h)
    assert [s.dim for s in lcs] == [3, 1, 0] and lcs[1] == span("d/dx1")
    assert [s.dim for s in derived_series(h)] == [3, 1, 0]
    b = sd_of(*B)
    assert [s.dim for s in lower_central_series(b)] == [2, 1]
    assert [s.dim for s in derived_series(b)] == [2, 1, 0]


def test_nilpotency_examples():
    assert nilpotency_class(sd_of(*H)) == 2
    assert nilpotency_class(sd_of(*B)) is None and not is_nilpotent(sd_of(*B))
    assert nilpotency_class(sd_of("x1*d/dx1")) == 1


def test_center_examples():
    ab = span("x1*d/dx1", "x2*d/dx2")
    assert center(structure_constants(ab)) == ab
    assert center(sd_of(*H)) == span("d/dx1")
    assert center(sd_of(*B)).dim == 0


def test_center_mod_examples():
    h = sd_of(*H)
    assert center_mod(h, zero_span(CTX3)) == center(h)
    assert center_mod(h, span("d/dx1")) == h.span
    assert center_mod(h, h.span) == h.span


def test_center_mod_rejects_non_ideal():
    h = sd_of(*H)
    assert check_ideal(h, span("d/dx2")) is not None
    with pytest.raises(NotAnIdealError) as info:
        center_mod(h, span("d/dx2"))
    x, y = info.value.witness
    assert d_bracket(x, y) not in span("d/dx2")


def test_ad_examples():
    ab = sd_of("x1*d/dx1", "x2*d/dx2")
    assert all(not any(r) for r in ad_matrix(ab, 0))
    h = sd_of(*H)
    m = ad_matrix(h, 2)
    assert matvec(m, [0, 1, 0]) == [1, 0, 0]
    assert is_nilpotent_matrix(m) and sp.Matrix(m).rank() == 1
    b = sd_of(*B)
    m = ad_matrix(b, 1)
    assert not is_nilpotent_matrix(m)
    assert sp.Matrix(m).eigenvals() == {-1: 1, 0: 1}


def test_common_kernel_examples():
    assert common_kernel([[[0, 0], [0, 0]]]) == [1, 0]
    assert common_kernel([[[0, 1], [0, 0]]]) == [1, 0]
    h = sd_of(*H)
    ops = [ad_matrix(h, 0), ad_matrix(h, 2)]
    v = common_kernel(ops)
    assert any(v) and all(not any(matvec(m, v)) for m in ops)


def test_common_kernel_rejects_bad_input():
    with pytest.raises(ValueError):
        common_kernel([[[1, 0], [0, 0]]])
    with pytest.raises(ValueError):
        common_kernel([[[0, 1], [0, 0]], [[0, 0], [1, 0]]])
    with pytest.raises(ValueError):
        common_kernel([[]])


def test_constants_membership_examples():
    assert constants_membership(span("d/dx1"), parse_rational("x2/x3", CTX3))
    assert not constants_membership(span("d/dx1"), parse_rational("x1", CTX3))
    assert not constants_membership(build_rank3_type1(1), parse_rational("x3", CTX3))


# invariants on random nilpotent algebras

@pytest.mark.parametrize("sd", POP, ids=lambda s: f"dim{s.dim}")
def test_nilpotent_invariants(sd):
    assert is_nilpotent(sd)
    assert center(sd).dim >= 1
    r = rank_R(sd.span)
    if r == 1:
        assert all(not any(c) for row in sd.constants for c in row)
    if r >= 1:
        assert rank_R(derived_series(sd)[1]) < r
    for i in range(sd.dim):
        m = ad_matrix(sd, i)
        power = m
        for _ in range(sd.dim - 1):
            power = matmul(power, m)
        assert all(not any(row) for row in power)
    for i in range(sd.dim):
        for j in range(sd.dim):
            assert sd.constants[i][j] == tuple(-x for x in sd.constants[j][i])
    dims = [s.dim for s in lower_central_series(sd)]
    assert dims == sorted(dims, reverse=True) and len(set(dims)) == len(dims) and dims[-1] == 0
