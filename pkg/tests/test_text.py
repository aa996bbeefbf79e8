import pytest
from hypothesis import given

from contractil import serialize
from contractil.errors import ParseError
from contractil.instruments import (
    EXAMPLE_OPTION_TEXT,
    FX_SWAP_TEXT,
    TEMPLATED_TEXT,
    example_option,
    fx_swap,
    templated_example,
)
from contractil.syntax import Obs, Op, OpE, RealLit, Tnum, Transfer, Translate
from contractil.text import parse_contract, parse_exp, print_contract, print_exp

from strategies import contracts, exps


@pytest.mark.parametrize("text, built", [
    (EXAMPLE_OPTION_TEXT, example_option),
    (FX_SWAP_TEXT, fx_swap),
    (TEMPLATED_TEXT, templated_example),
])
def test_example_texts_parse_to_builders(text, built):
    assert parse_contract(text) == built()


def test_thousands_separator():
    assert parse_exp("1.000.000") == RealLit(1_000_000.0)
    assert parse_exp("1.5") == RealLit(1.5)


def test_greater_than_swaps_operands():
    assert parse_exp("obs(A,0) > 1.0") == OpE(Op.LT, (RealLit(1.0), Obs("A", 0)))


def test_default_asset():
    assert parse_contract("transfer(a, b)") == Transfer("a", "b", "CUR")


def test_comments_and_parens():
    c = parse_contract("-- a note\n(translate(3, transfer(a, b, X)))")
    assert c == Translate(Tnum(3), Transfer("a", "b", "X"))


@pytest.mark.parametrize("text", [
    "translate(-1, zero)",
    "scale(1.0, )",
    "if(true, zero)",
    "transfer(a b)",
    "zero zero",
    "obs(AAPL)",
    "acc(x. x, -1, 0.0)",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_contract(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_contract("both(zero,\n  nonsense)")
    assert info.value.line == 2
    assert info.value.column == 3


@given(contracts)
def test_print_parse_round_trip(c):
    assert parse_contract(print_contract(c)) == c
    assert parse_contract(print_contract(c, indent=None)) == c


@given(exps)
def test_expression_round_trip(e):
    assert parse_exp(print_exp(e)) == e


@given(contracts)
def test_json_round_trip(c):
    assert serialize.loads(serialize.dumps(c)) == c
