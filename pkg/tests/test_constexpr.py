from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from errsumlab.constexpr import (
    Add,
    Cos,
    Div,
    Exp,
    Mul,
    Neg,
    ParseError,
    Rat,
    Sin,
    Sqrt,
    Sub,
    eval_enclosure,
    is_rational,
    parse,
    unparse,
)
from errsumlab.contfrac import rational_quotients
from errsumlab.numerics import DomainError, Enclosure, tolerance


def r(x):
    return Rat(Fraction(x))


class TestParse:
    def test_bare_e(self):
        assert parse("e") == Exp(r(1))

    def test_scaled_power_of_e(self):
        assert parse("2*e^(1/6)") == Mul(r(2), Exp(r(Fraction(1, 6))))

    def test_golden_ratio(self):
        assert parse("(1+sqrt(5))/2") == Div(Add(r(1), Sqrt(r(5))), r(2))

    def test_incomplete_power(self):
        with pytest.raises(ParseError) as info:
            parse("e^")
        assert info.value.offset == 2

    def test_whitespace_is_insignificant(self):
        assert parse("  2 *  e ^ ( 1 / 6 ) ") == parse("2*e^(1/6)")

    def test_decimals_are_exact(self):
        assert parse("0.125") == r(Fraction(1, 8))
        assert parse("1.10") == r(Fraction(11, 10))

    def test_precedence_and_associativity(self):
        assert parse("1-2-3") == Sub(Sub(r(1), r(2)), r(3))
        assert parse("1+2*3") == Add(r(1), Mul(r(2), r(3)))
        assert parse("-2*3") == Mul(Neg(r(2)), r(3))
        assert parse("8/4/2") == Div(Div(r(8), r(4)), r(2))

    def test_power_on_exp_atom(self):
        assert parse("exp(2)^(1/4)") == Exp(r(Fraction(1, 2)))
        assert parse("e^(-3/2)") == Exp(r(Fraction(-3, 2)))
        assert parse("exp(sqrt(2))^(3)") == Exp(Mul(Sqrt(r(2)), r(3)))

    def test_functions(self):
        assert parse("sin(1/2)") == Sin(Div(r(1), r(2)))
        assert parse("cos(0)") == Cos(r(0))

    @pytest.mark.parametrize(
        "text, offset",
        [
            ("e^x", 2),
            ("e^(sqrt(2))", 3),
            ("2^(3)", 1),
            ("(1+2", 4),
            ("1 + * 2", 4),
            ("log(2)", 0),
            ("3 $ 4", 2),
            ("", 0),
            ("sqrt 2", 5),
            ("e^(1/0)", 5),
        ],
    )
    def test_syntax_errors_carry_offsets(self, text, offset):
        with pytest.raises(ParseError) as info:
            parse(text)
        assert info.value.offset == offset

    def test_expected_tokens_are_reported(self):
        with pytest.raises(ParseError) as info:
            parse("(1+2")
        assert "')'" in info.value.expected


# expression strings in the surface grammar
_atoms = st.one_of(
    st.integers(min_value=0, max_value=12).map(str),
    st.sampled_from(["e", "0.5", "2.25", "e^(1/3)", "e^(-2/5)"]),
)


def _combine(children):
    # exp only sees bounded arguments so values stay at desk scale
    unary = st.tuples(st.sampled_from(["sqrt", "sin", "cos"]), children).map(lambda t: f"{t[0]}({t[1]})")
    bounded = st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: f"exp({t[0]}({t[1]}))")
    binary = st.tuples(children, st.sampled_from("+-*/"), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})")
    neg = children.map(lambda c: f"-{c}")
    power = st.tuples(children, st.sampled_from(["1/3", "2", "-3/7"])).map(lambda t: f"exp(cos({t[0]}))^({t[1]})")
    return st.one_of(unary, bounded, binary, neg, power)


texts = st.recursive(_atoms, _combine, max_leaves=8)


@given(texts)
def test_unparse_round_trip(text):
    tree = parse(text)
    assert parse(unparse(tree)) == tree


def test_unparse_examples():
    assert unparse(parse("2*e^(1/6)")) == "(2 * e^(1/6))"
    assert unparse(parse("(1+sqrt(5))/2")) == "((1 + sqrt(5)) / 2)"
    assert unparse(parse("exp(sqrt(2))^(1/3)")) == "exp(sqrt(2))^(1/3)"


class TestEval:
    def test_e(self):
        enc = eval_enclosure("e", 15)
        assert enc.width <= tolerance(15)
        assert oracles.dec(oracles.E) in enc

    def test_golden_ratio(self):
        enc = eval_enclosure("(1+sqrt(5))/2", 12)
        assert oracles.near(enc.mid, "1.618033988750", 12)
        assert oracles.dec(oracles.GOLDEN) in enc

    def test_sin_cos_constant_starts_like_the_published_expansion(self):
        enc = eval_enclosure("4*(11*sin(1/2)-6*cos(1/2))/(53*cos(1/2)-97*sin(1/2))", 12)
        assert 4 < enc.lo and enc.hi < 5
        assert oracles.dec(oracles.SIN_COS) in enc
        assert rational_quotients(enc.lo)[:3] == rational_quotients(enc.hi)[:3] == [4, 3, 4]

    def test_against_mpmath(self):
        expr = "exp(sqrt(2))^(1/3) - cos(7)/sin(3) + e^(-2/5)"
        ref = mpmath.exp(mpmath.sqrt(2) / 3) - mpmath.cos(7) / mpmath.sin(3) + mpmath.exp(mpmath.mpf(-2) / 5)
        enc = eval_enclosure(expr, 40)
        assert enc.width <= tolerance(40)
        assert enc.contains(oracles.mp_value(ref))

    @pytest.mark.parametrize(
        "text, value",
        [
            ("1/3 + 2/7", Fraction(13, 21)),
            ("(0.25 - 3)*4/9", Fraction(-11, 9)),
            ("-(5)", Fraction(-5)),
            ("((1/2)/(1/3))", Fraction(3, 2)),
            ("e^(0)", Fraction(1)),
        ],
    )
    def test_rational_expressions_are_exact(self, text, value):
        enc = eval_enclosure(text, 3)
        assert enc.is_point and enc.lo == value

    def test_sqrt_of_perfect_square_rational(self):
        assert eval_enclosure("sqrt(9/4)", 10) == Enclosure.point(Fraction(3, 2))
        assert not is_rational(parse("sqrt(9/4)"))

    @pytest.mark.parametrize("text", ["1/0", "sqrt(-1)", "1/(e - e)", "sqrt(0 - 2)", "1/(3/4 - 0.75)"])
    def test_domain_errors(self, text):
        with pytest.raises(DomainError):
            eval_enclosure(text, 10)

    def test_sqrt_of_zero(self):
        assert eval_enclosure("sqrt(0)", 10) == Enclosure.point(0)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(texts, st.integers(min_value=3, max_value=25))
def test_nesting_under_precision_increase(text, digits):
    """Randomized expressions: the enclosure at D + 10 lies inside the one at D."""
    try:
        coarse = eval_enclosure(text, digits)
    except (DomainError, OverflowError, ArithmeticError):
        return
    fine = eval_enclosure(text, digits + 10)
    assert coarse.width <= tolerance(digits)
    assert coarse.contains(fine)
