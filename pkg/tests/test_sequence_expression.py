import math

import numpy as np
import pytest

from errors import ExpressionError
from sequence_expression import compile_expression


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2^3^2", 512.0),
        ("-2^2", -4.0),
        ("(-2)^2", 4.0),
        ("1 + 2*3 - 4/8", 6.5),
        ("2^(-1)", 0.5),
        ("sqrt(16) + abs(-3)", 7.0),
        ("log(e)", 1.0),
        ("1e-3*1000", 1.0),
    ],
)
def test_precedence_and_constants(text, expected):
    assert compile_expression(text, ())() == pytest.approx(expected)


def test_sequence_in_n():
    expr = compile_expression("n^(-(1 + sin(pi*n) + 1/n))")
    assert expr.variables == ("n",)
    assert expr(n=2.0) == pytest.approx(2.0 ** -1.5)
    values = expr(n=np.array([1.0, 4.0]))
    np.testing.assert_allclose(values, [1.0, 4.0 ** -1.25])


def test_profile_in_two_variables():
    profile = compile_expression("sin(pi*ux)*sin(pi*uy)", ("ux", "uy")).as_function("ux", "uy")
    assert profile(0.5, 0.5) == pytest.approx(1.0)
    grid = profile(np.array([[0.5], [0.25]]), np.array([0.5, 1.0]))
    assert grid.shape == (2, 2)
    assert grid[1, 0] == pytest.approx(math.sin(math.pi / 4))


def test_constant_expression_follows_argument_shape():
    zero = compile_expression("0", ("u",)).as_function("u")
    assert zero(np.linspace(0.0, 1.0, 7)).shape == (7,)
    assert zero(0.3) == 0.0


def test_unknown_name_reports_position():
    with pytest.raises(ExpressionError) as info:
        compile_expression("n + q")
    assert info.value.position == 4
    assert "unknown name 'q'" in str(info.value)
    assert "    ^" in str(info.value)


def test_unknown_function():
    with pytest.raises(ExpressionError) as info:
        compile_expression("tan(n)")
    assert "unknown function 'tan'" in info.value.reason


@pytest.mark.parametrize("text", ["n +", "2^-1", "sin(n", ""])
def test_parse_errors(text):
    with pytest.raises(ExpressionError):
        compile_expression(text)


def test_unbound_variable():
    expr = compile_expression("n*m", ("n", "m"))
    with pytest.raises(ExpressionError):
        expr(n=1.0)
    with pytest.raises(ExpressionError):
        expr.as_function("n")
