import os
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derlie import kernels

BACKENDS = kernels.backends()


def _poly(rng, nvars=3, terms=6, deg=4):
    out = {}
    for _ in range(rng.randint(0, terms)):
        e = tuple(rng.randint(0, deg) for _ in range(nvars))
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if c:
            out[e] = c
    return out


def _vectors(rng, count, width):
    return [{(i % 3, (i,)): Fraction(rng.choice((-3, -2, -1, 1, 2, 3))) for i in rng.sample(range(width), rng.randint(1, width))}
            for _ in range(count)]


def _clean(d):
    return {k: v for k, v in d.items() if v}


def _key(col):
    return (col[0], sum(col[1]), col[1])


def test_compiled_backend_is_selected_when_built():
    if "compiled" not in BACKENDS:
        pytest.skip("extension not built")
    if os.environ.get("DERLIE_PURE_PYTHON"):
        pytest.skip("pure-Python backend forced")
    assert kernels.BACKEND == "compiled"


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree_on_polynomial_kernels(seed):
    rng = random.Random(seed)
    a, b = _poly(rng), _poly(rng)
    exp = tuple(rng.randint(0, 2) for _ in range(3))
    coeff = Fraction(rng.randint(-3, 3), 2)
    results = {}
    for name, mod in BACKENDS.items():
        results[name] = (mod.poly_add(a, b), mod.poly_add(a, b, Fraction(-1, 3)),
                         mod.poly_mul(a, b), mod.poly_mul_term(a, exp, coeff))
    ref = results["python"]
    for got in results.values():
        assert got == ref
    assert ref[2] == _clean(ref[2])


def test_poly_mul_matches_schoolbook():
    rng = random.Random(3)
    for _ in range(50):
        a, b = _poly(rng), _poly(rng)
        expected = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                expected[e] = expected.get(e, 0) + c1 * c2
        for mod in BACKENDS.values():
            assert mod.poly_mul(a, b) == _clean(expected)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree_on_rref(seed):
    rng = random.Random(seed)
    vecs = _vectors(rng, rng.randint(0, 7), 8)
    outs = {name: mod.rref(vecs, _key) for name, mod in BACKENDS.items()}
    rows, pivots = outs["python"]
    for got in outs.values():
        assert got == (rows, pivots)
    # reduced: each pivot column is zero in every other row
    for t, p in enumerate(pivots):
        assert rows[t][p] == 1
        assert all(p not in r for s, r in enumerate(rows) if s != t)
    # every input reduces to zero against the result
    for v in vecs:
        for mod in BACKENDS.values():
            _, res = mod.reduce_vector(v, rows, pivots)
            assert not res


def test_rref_is_independent_of_input_order():
    rng = random.Random(5)
    for _ in range(30):
        vecs = _vectors(rng, 5, 6)
        shuffled = vecs[:]
        rng.shuffle(shuffled)
        assert kernels.rref(vecs, _key) == kernels.rref(shuffled, _key)


def test_environment_forces_python_backend():
    import subprocess
    import sys
    env = dict(os.environ, DERLIE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from derlie import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
