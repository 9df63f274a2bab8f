from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.parsing import BinaryNode, LabelNode, ParseError, parse_call, parse_label_expression, parse_scalar
from vertexlab.scalar import param


def test_scalar_expressions():
    lam = param("lam")
    assert parse_scalar("-3/2*lam + 1") == -3 * lam / 2 + 1
    assert parse_scalar("(lam-1)^2") == (lam - 1) ** 2
    assert parse_scalar("lam/(lam+1)") == lam / (lam + 1)


def test_label_precedence():
    node = parse_label_expression("SC(1) + W(0,a) * W(-1,b)")
    assert isinstance(node, BinaryNode) and node.op == "+"
    assert isinstance(node.right, BinaryNode) and node.right.op == "*"
    assert node.left == LabelNode("SC", 1, None, 0)


def test_parentheses_and_kinds():
    node = parse_label_expression("(M + Pi(1, a)) * SPi(-2, b+1)")
    assert node.op == "*"
    assert node.left.op == "+"
    assert node.right.kind == "SPi" and node.right.index == -2


@pytest.mark.parametrize(
    "text,position",
    [
        ("W(0,a", 5),
        ("SC(1/2)", 4),
        ("W(0,a) + ", 9),
        ("Q(1)", 0),
        ("W(0,a)$", 6),
    ],
)
def test_errors_report_positions(text, position):
    with pytest.raises(ParseError) as info:
        parse_label_expression(text)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


def test_scalar_errors():
    with pytest.raises(ParseError):
        parse_scalar("1 +")
    with pytest.raises(ParseError):
        parse_scalar("a b")


def test_call_syntax():
    name, args = parse_call("e(1, a, -2)")
    assert name == "e"
    assert args == [1, param("a"), -2]


@settings(max_examples=50, deadline=None)
@given(st.integers(-50, 50), st.integers(1, 20), st.integers(-5, 5))
def test_scalar_roundtrip(p, q, k):
    x = Fraction(p, q) * param("t") + k
    assert parse_scalar(str(x)) == x
