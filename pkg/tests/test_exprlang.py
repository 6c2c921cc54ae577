import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracbvp.errors import ArityError, EvalPole, ExprSyntaxError, UnknownIdentifier
from fracbvp.exprlang import BinOp, Call, Neg, Num, Var, evaluate, parse, pretty

# (text, variable value, exact expected result); every entry is exactly
# representable so equality is checked without tolerance
CORPUS = [
    ("2+3*4", 0.0, 14.0),
    ("2*3+4", 0.0, 10.0),
    ("(2+3)*4", 0.0, 20.0),
    ("2^3^2", 0.0, 512.0),
    ("-2^2", 0.0, -4.0),
    ("(-2)^2", 0.0, 4.0),
    ("2^-3", 0.0, 0.125),
    ("8/4/2", 0.0, 1.0),
    ("8-4-2", 0.0, 2.0),
    ("2+3*4^2", 0.0, 50.0),
    ("sec(0)", 0.0, 1.0),
    ("cos(0)+sin(0)", 0.0, 1.0),
    ("exp(0)", 0.0, 1.0),
    ("ln(e)", 0.0, 1.0),
    ("sqrt(16)", 0.0, 4.0),
    ("abs(-5)+1", 0.0, 6.0),
    ("pi/pi", 0.0, 1.0),
    ("t^2", 1.5, 2.25),
    ("t*(exp(t)-1)", 0.0, 0.0),
    ("1/(1+t)", 3.0, 0.25),
]


class TestCorpus:
    @pytest.mark.parametrize("text,value,expected", CORPUS)
    def test_exact_values(self, text, value, expected):
        assert evaluate(parse(text, "t"), value) == expected

    @pytest.mark.parametrize("text,value,expected", CORPUS)
    def test_pretty_round_trip(self, text, value, expected):
        tree = parse(text, "t")
        assert parse(pretty(tree), "t") == tree


class TestParsing:
    def test_paper_forcings(self):
        assert evaluate(parse("t^2", "t"), 5.0 / 3.0) == (5.0 / 3.0) ** 2
        assert evaluate(parse("y*(exp(y)-1)", "y"), 0.0) == 0.0
        assert evaluate(parse("y*(exp(y)-1)", "y"), 1.0) == pytest.approx(
            math.e - 1.0, rel=1e-15
        )
        assert evaluate(parse("sec(y)^2", "y"), 0.0) == 1.0

    def test_whitespace_insensitive(self):
        assert parse(" 2 +  3*4 ", "t") == parse("2+3*4", "t")

    def test_scientific_literals(self):
        assert evaluate(parse("1e-3", "t"), 0.0) == 1e-3
        assert evaluate(parse("2.5e2", "t"), 0.0) == 250.0

    @pytest.mark.parametrize("text,offset", [("2+", 2), ("(2", 2), ("2 @ 3", 2)])
    def test_syntax_errors_carry_offsets(self, text, offset):
        with pytest.raises(ExprSyntaxError) as err:
            parse(text, "t")
        assert err.value.offset == offset

    def test_empty(self):
        with pytest.raises(ExprSyntaxError):
            parse("   ", "t")

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier):
            parse("x+1", "t")
        with pytest.raises(UnknownIdentifier):
            parse("foo(2)", "t")

    def test_arity_errors(self):
        with pytest.raises(ArityError):
            parse("exp()", "t")
        with pytest.raises(ArityError):
            parse("exp(1,2)", "t")

    def test_trailing_input(self):
        with pytest.raises(ExprSyntaxError):
            parse("1 2", "t")


class TestEvaluation:
    def test_sec_pole(self):
        with pytest.raises(EvalPole):
            evaluate(parse("sec(pi/2)", "t"), 0.0)

    def test_division_pole(self):
        with pytest.raises(EvalPole):
            evaluate(parse("1/t", "t"), 0.0)

    def test_negative_base_fractional_power(self):
        with pytest.raises(EvalPole):
            evaluate(parse("(-2)^0.5", "t"), 0.0)

    def test_overflow_is_a_pole(self):
        with pytest.raises(EvalPole):
            evaluate(parse("exp(t)", "t"), 1000.0)

    def test_log_domain(self):
        with pytest.raises(EvalPole):
            evaluate(parse("ln(-1)", "t"), 0.0)

    def test_sqrt_domain(self):
        with pytest.raises(EvalPole):
            evaluate(parse("sqrt(t)", "t"), -4.0)

    def test_non_finite_input(self):
        with pytest.raises(EvalPole):
            evaluate(parse("t", "t"), math.inf)

    def test_pole_reports_subexpression(self):
        with pytest.raises(EvalPole) as err:
            evaluate(parse("1+sec(pi/2)", "t"), 0.0)
        assert "sec" in str(err.value)

    def test_determinism(self):
        tree = parse("sin(t)*exp(t/7)+t^3", "t")
        assert evaluate(tree, 0.8125) == evaluate(tree, 0.8125)


def _expr_strategy():
    numbers = st.floats(min_value=0.0, max_value=100.0, allow_nan=False).map(Num)
    leaves = st.one_of(numbers, st.just(Var("t")))

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/^"), children, children).map(
                lambda t: BinOp(t[0], t[1], t[2])
            ),
            children.map(Neg),
            st.tuples(st.sampled_from(["exp", "ln", "sqrt", "sin", "cos", "sec", "abs"]), children).map(
                lambda t: Call(t[0], t[1])
            ),
        )

    return st.recursive(leaves, extend, max_leaves=12)


class TestRoundTripProperty:
    @given(_expr_strategy())
    @settings(deadline=None, max_examples=300)
    def test_pretty_then_parse_is_identity(self, tree):
        assert parse(pretty(tree), "t") == tree
