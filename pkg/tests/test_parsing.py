import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CTX3, random_derivation
from derlie.derivation import Derivation
from derlie.parsing import ParseError, parse_derivation, parse_expression, parse_rational
from derlie.ratfield import RationalFunction, VarContext


def test_precedence_and_power():
    assert parse_rational("1 + 2*x1^2", CTX3) == parse_rational("(2*(x1*x1)) + 1", CTX3)
    assert parse_rational("-2/5", CTX3) == RationalFunction.constant(3, Fraction(-2, 5))
    assert parse_rational("x1/x2/x3", CTX3) == parse_rational("x1/(x2*x3)", CTX3)
    assert parse_rational("-x1^2", CTX3) == -parse_rational("x1^2", CTX3)


def test_derivation_syntax():
    D = parse_derivation("x2*d/dx1 + d/dx2", CTX3)
    assert D == Derivation.partial(CTX3, 1, parse_rational("x2", CTX3)) + Derivation.partial(CTX3, 2)
    assert parse_derivation("0", CTX3).is_zero()


def test_named_derivations_from_environment():
    env = {"E": parse_derivation("x1*d/dx1", CTX3)}
    assert parse_derivation("x2*E - d/dx3", CTX3, env) == parse_derivation("x1*x2*d/dx1 - d/dx3", CTX3)


def test_custom_variable_names():
    ctx = VarContext(2, ("u", "v"))
    D = parse_derivation("v*d/du", ctx)
    assert str(D) == "v*d/du"


@pytest.mark.parametrize("text, message", [
    ("d/dx9", "variable index out of range"),
    ("x4", "variable index out of range"),
    ("x1^x2", ""),
    ("x1 +", ""),
    ("(x1", ""),
    ("x1 $ 2", "unexpected character"),
    ("d/dx1 * d/dx2", ""),
    ("1/0", "division by zero"),
])
def test_errors(text, message):
    with pytest.raises(Exception) as info:
        parse_expression(text, CTX3)
    assert message in str(info.value)


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_derivation("x1*d/dx9", CTX3, line=4, col0=10)
    assert info.value.line == 4
    assert info.value.col == 13


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    D = random_derivation(random.Random(seed))
    assert parse_derivation(str(D), CTX3) == D
