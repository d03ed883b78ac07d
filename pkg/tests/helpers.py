"""Seeded random generators shared by the test modules."""
import random
from fractions import Fraction

from derlie.derivation import Derivation
from derlie.liespan import closure, is_nilpotent, structure_constants
from derlie.ratfield import Polynomial, RationalFunction, VarContext

CTX3 = VarContext(3)


def random_poly(rng, n, max_deg, max_terms=3, coeff=5):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        d = rng.randint(0, max_deg)
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        c = rng.randint(-coeff, coeff)
        if c:
            terms[tuple(e)] = Fraction(c, rng.choice((1, 1, 2, 3)))
    return Polynomial(n, terms)


def random_nonzero_poly(rng, n, max_deg, max_terms=3):
    while True:
        p = random_poly(rng, n, max_deg, max_terms)
        if not p.is_zero():
            return p


def random_rf(rng, n=3, num_deg=3, den_deg=2, poly_bias=0.3):
    num = random_poly(rng, n, num_deg)
    if rng.random() < poly_bias:
        return RationalFunction(num)
    return RationalFunction(num, random_nonzero_poly(rng, n, den_deg, 2))


def random_derivation(rng, ctx=CTX3, num_deg=3, den_deg=2, density=0.7):
    return Derivation(ctx, [random_rf(rng, ctx.n, num_deg, den_deg) if rng.random() < density
                            else RationalFunction.zero(ctx.n) for _ in range(ctx.n)])


def random_triangular_monomial(rng, ctx=CTX3, max_deg=2):
    n = ctx.n
    i = rng.randint(1, n)
    e = [0] * n
    if i < n:
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(i, n)] += 1
    coeff = RationalFunction(Polynomial.monomial(n, e, rng.choice((1, -1, 2, Fraction(1, 2), 3))))
    return Derivation.partial(ctx, i, coeff)


def random_nilpotent_algebra(rng, ctx=CTX3, max_dim=12, max_deg=2, min_dim=2):
    """Closed nilpotent algebra generated by random combos of triangular monomials."""
    while True:
        gens = []
        for _ in range(rng.randint(2, 3)):
            D = Derivation.zero(ctx)
            for _ in range(rng.randint(1, 3)):
                D = D + random_triangular_monomial(rng, ctx, max_deg) * rng.randint(1, 3)
            gens.append(D)
        out = closure(gens, dim_cap=max_dim)
        if not out.closed or not min_dim <= out.span.dim <= max_dim:
            continue
        sd = structure_constants(out.span)
        assert is_nilpotent(sd), "triangular derivations generate nilpotent algebras"
        return sd


def nilpotent_population(seed, count, **kw):
    rng = random.Random(seed)
    return [random_nilpotent_algebra(rng, **kw) for _ in range(count)]
