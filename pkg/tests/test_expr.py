import math

import numpy as np
import pytest

from projconn import expr as ex
from exprgen import central_difference, seeded_pairs

# strings that must survive a parse -> print -> parse round trip unchanged
ROUND_TRIP_CORPUS = [
    "1",
    "0",
    "42",
    "3.25",
    "1e-06",
    "2.5e3",
    "x",
    "theta",
    "a+b",
    "a-b",
    "a*b",
    "a/b",
    "a+b+c",
    "a-b-c",
    "a-(b-c)",
    "a*b+c",
    "a+b*c",
    "(a+b)*c",
    "a*(b+c)",
    "a/(b*c)",
    "a/b/c",
    "a/(b/c)",
    "a*b/c",
    "a-(b+c)",
    "-x",
    "--x",
    "-x^2",
    "(-x)^2",
    "-(a+b)",
    "-(a*b)",
    "x^2",
    "x^10",
    "x^-2",
    "(a+b)^3",
    "(x^2)^3",
    "sin(theta)",
    "sin(theta)^2",
    "cos(x)*sin(y)",
    "tan(x/2)",
    "exp(2*t)",
    "exp(-t)",
    "log(x+1)",
    "sqrt(x^2+1)",
    "sinh(u)-cosh(u)",
    "1/sin(chi)",
    "1/(sin(chi)*sin(theta))",
    "sin(theta)^2/4",
    "0.25*r^2",
    "a*b*c-d/e",
    "sin(cos(x))",
    "x*y+y*z+z*x",
    "-sin(theta)*cos(theta)",
    "2*sin(theta)*cos(theta)",
    "x+y-z*w/v",
]


def test_parse_power_of_function():
    tree = ex.parse("sin(theta)^2")
    assert tree == ex.Pow(ex.Call("sin", ex.Var("theta")), 2)


def test_parse_constant():
    assert ex.parse("1") == ex.Const(1.0)


def test_parse_precedence_product_before_sum():
    tree = ex.parse("a*b+c")
    assert tree == ex.Add(ex.Mul(ex.Var("a"), ex.Var("b")), ex.Var("c"))


def test_parse_left_associativity():
    assert ex.parse("a-b-c") == ex.Sub(ex.Sub(ex.Var("a"), ex.Var("b")), ex.Var("c"))
    assert ex.parse("a/b/c") == ex.Div(ex.Div(ex.Var("a"), ex.Var("b")), ex.Var("c"))


def test_parse_unary_minus_binds_looser_than_power():
    assert ex.parse("-x^2") == ex.Neg(ex.Pow(ex.Var("x"), 2))


def test_parse_error_reports_offset():
    with pytest.raises(ex.ParseError) as err:
        ex.parse("a +* b")
    assert err.value.position == 4


def test_parse_error_trailing_input():
    with pytest.raises(ex.ParseError) as err:
        ex.parse("a b")
    assert err.value.position == 3


def test_parse_unknown_function():
    with pytest.raises(ex.ParseError) as err:
        ex.parse("1+foo(x)")
    assert "unknown function" in str(err.value)
    assert err.value.position == 3


def test_parse_fractional_exponent_rejected():
    with pytest.raises(ex.ParseError):
        ex.parse("x^2.5")


@pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
def test_round_trip_is_structural_identity(text):
    tree = ex.parse(text)
    assert ex.parse(ex.to_text(tree)) == tree


def test_eval_simple():
    assert ex.evaluate(ex.parse("sin(theta)^2"), {"theta": math.pi / 2}) == pytest.approx(1.0)


def test_eval_division_by_zero_names_subexpression():
    with pytest.raises(ex.DomainError) as err:
        ex.evaluate(ex.parse("1/x"), {"x": 0.0})
    assert "1/x" in str(err.value)


def test_eval_log_domain():
    with pytest.raises(ex.DomainError):
        ex.evaluate(ex.parse("log(x)"), {"x": -2.0})


def test_eval_unbound_variable():
    with pytest.raises(ex.UnboundVariableError):
        ex.evaluate(ex.parse("x+y"), {"x": 1.0})


def test_diff_product_of_trig():
    # d/dtheta sin^2 = 2 sin cos
    tree = ex.diff(ex.parse("sin(theta)^2"), "theta")
    for theta in (0.3, 1.1, 2.0):
        assert ex.evaluate(tree, {"theta": theta}) == pytest.approx(
            2.0 * math.sin(theta) * math.cos(theta), abs=1e-14
        )


def test_diff_of_constant_is_zero():
    assert ex.evaluate(ex.diff(ex.parse("c"), "theta"), {"c": 5.0}) == 0.0


def test_second_derivative_matches_hand_value():
    # d^2/dt^2 t^3 = 6t, so 12 at t = 2
    second = ex.diff(ex.diff(ex.parse("t^3"), "t"), "t")
    assert ex.evaluate(second, {"t": 2.0}) == pytest.approx(12.0, abs=1e-12)


def test_third_order_differentiation_supported():
    third = ex.parse("sin(theta)^2")
    for _ in range(3):
        third = ex.diff(third, "theta")
    second = ex.diff(ex.diff(ex.parse("sin(theta)^2"), "theta"), "theta")
    for theta in (0.4, 0.7, 1.3):
        env = {"theta": theta}
        fd = central_difference(second, "theta", env)
        assert ex.evaluate(third, env) == pytest.approx(fd, rel=1e-5, abs=1e-5)


def test_diff_against_finite_difference_example():
    tree = ex.parse("exp(2*t)")
    deriv = ex.diff(tree, "t")
    env = {"t": 0.3}
    fd = central_difference(tree, "t", env)
    value = ex.evaluate(deriv, env)
    assert abs(value - fd) <= 1e-6 * abs(value)


def test_diff_linearity_at_points():
    rng = np.random.default_rng(5)
    a = ex.parse("sin(x)*y")
    b = ex.parse("x^3+cos(y)")
    combined = ex.diff(ex.Add(a, b), "x")
    separate = ex.Add(ex.diff(a, "x"), ex.diff(b, "x"))
    for _ in range(20):
        env = {"x": float(rng.uniform(-2, 2)), "y": float(rng.uniform(-2, 2))}
        assert ex.evaluate(combined, env) == pytest.approx(
            ex.evaluate(separate, env), abs=1e-12
        )


def test_seeded_derivative_agreement_sample():
    # quick version of the acceptance property (full 1000 pairs run there)
    for tree, env in seeded_pairs(250, seed=20240601):
        value = ex.evaluate(ex.diff(tree, "x"), env)
        fd = central_difference(tree, "x", env)
        assert abs(value - fd) <= 1e-5 * (1.0 + abs(value)), ex.to_text(tree)


def test_printer_negative_constant_evaluates_equal():
    tree = ex.diff(ex.parse("cos(x)"), "x")  # -(sin(x)) style tree
    reparsed = ex.parse(ex.to_text(tree))
    for x in (0.2, 1.5):
        assert ex.evaluate(reparsed, {"x": x}) == pytest.approx(
            ex.evaluate(tree, {"x": x}), abs=1e-15
        )
