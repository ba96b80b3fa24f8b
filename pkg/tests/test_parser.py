import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khall.errors import ExprSyntaxError
from khall.parser import (
    AtNode,
    BinOp,
    DeltaNode,
    Int,
    KLit,
    Name,
    Neg,
    Pow,
    SeriesNode,
    evaluate,
    parse,
    to_text,
)
from khall.ring import Ring

names = st.sampled_from(["x", "y1", "z", "w2", "q", "u", "t", "f1_1"])
leaves = st.one_of(st.integers(0, 50).map(Int), names.map(Name))


def _extend(children):
    klit = st.lists(st.tuples(st.sampled_from([1, -1]), children), max_size=3).map(lambda xs: KLit(tuple(xs)))
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/"), children, children),
        st.builds(Pow, children, st.integers(-3, 3)),
        klit,
        children.map(DeltaNode),
        st.builds(SeriesNode, st.sampled_from(["wedge", "sym"]), klit),
        st.builds(SeriesNode, st.sampled_from(["wedge", "sym"]), klit, st.sampled_from("*/"), children),
        st.builds(AtNode, children, st.sampled_from(["x", "z"]), st.sampled_from(["inf", "zero", "both"])),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_round_trip(e):
    assert parse(to_text(e)) == e


def test_examples_parse():
    assert parse("delta(w/z)") == DeltaNode(BinOp("/", Name("w"), Name("z")))
    assert parse("1/(1-u*x)") == BinOp("/", Int(1), BinOp("-", Int(1), BinOp("*", Name("u"), Name("x"))))


def test_power_binds_tighter_than_minus():
    assert parse("-x^2") == Neg(Pow(Name("x"), 2))


def test_unbalanced_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse("wedge(K[+u,-1]")
    assert (info.value.line, info.value.column) == (1, 15)


@pytest.mark.parametrize("text", ["x +", "(x", "K[u", "delta()", "x ^ y", "at(x, x, up)", "x $ y"])
def test_malformed(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


def test_multiline_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse("x +\n  * y")
    assert info.value.line == 2


def test_evaluate_geometric():
    value, ring = evaluate("at(1/(1-u*x), x, zero)", Ring(["u"]), 3)
    u = ring.gen("u")
    for k in range(4):
        assert value.coefficient(k) == u**k
