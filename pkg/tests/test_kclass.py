import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import const, var
from khall.distcalc import expand
from khall.errors import RankNotZero, UnknownMonomial
from khall.kclass import (
    KClass,
    calculation_lemma_check,
    chi,
    chi_table,
    sym_series,
    twisted_expansion,
    wedge_series,
)
from khall.laurent import RatFun
from khall.ring import Ring, preset

R = Ring(["a", "b", "c"], label="free")


def test_rank_det_dual():
    K = KClass(R, ["a", "b"], ["c"])
    assert K.rank == 1
    assert K.det() == R.gen("a") * R.gen("b") * R.gen("c") ** -1
    assert K.dual().dual() == K
    assert str(KClass(R, ["a", 1], [1])) == "K[+a]"


def test_arithmetic_and_cancellation():
    K = KClass(R, ["a"]) + KClass(R, [], ["a"])
    assert K == 0
    L = KClass(R, ["a"]) * KClass(R, ["b"], [1])
    assert L.element() == R.gen("a") * R.gen("b") - R.gen("a")
    assert (2 * KClass(R, ["c"])).rank == 2


def test_wedge_of_line_minus_one():
    x = var(R, "x")
    f = wedge_series(KClass(R, ["a"], [1]), "x")
    assert f == (1 - R.gen("a") * x) * RatFun(1 - x).inverse()


def elementary(roots, k):
    total = const(R, 0)
    for combo in itertools.combinations(roots, k):
        term = const(R, 1)
        for u in combo:
            term = term * u
        total = total + term
    return total


def complete(roots, k):
    total = const(R, 0)
    for combo in itertools.combinations_with_replacement(roots, k):
        term = const(R, 1)
        for u in combo:
            term = term * u
        total = total + term
    return total


line = st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)).map(
    lambda e: R.unit(dict(zip("abc", e)))
)


@settings(max_examples=40, deadline=None)
@given(st.lists(line, max_size=3))
def test_wedge_coefficients_are_signed_elementary(roots):
    P = KClass(R, roots)
    s = expand(wedge_series(P, "x"), "x", "zero", 4)
    for k in range(5):
        assert s.coefficient(k) == elementary(roots, k) * (-1) ** k


@settings(max_examples=40, deadline=None)
@given(st.lists(line, max_size=3))
def test_sym_coefficients_are_complete(roots):
    P = KClass(R, roots)
    s = expand(sym_series(P, "x"), "x", "zero", 4)
    for k in range(5):
        assert s.coefficient(k) == complete(roots, k)


@settings(max_examples=40, deadline=None)
@given(st.lists(line, max_size=2), st.lists(line, max_size=2), st.lists(line, max_size=2))
def test_whitney_multiplicativity(p, m, q):
    A = KClass(R, p, m)
    B = KClass(R, q)
    assert wedge_series(A + B, "x") == wedge_series(A, "x") * wedge_series(B, "x")
    assert sym_series(A, "x") * wedge_series(A, "x") == 1


@settings(max_examples=25, deadline=None)
@given(st.lists(line, min_size=1, max_size=3), st.lists(line, min_size=1, max_size=3), line)
def test_calculation_lemma(plus, minus, L):
    n = min(len(plus), len(minus))
    P = KClass(R, plus[:n], minus[:n])
    res = calculation_lemma_check(P, L, 6)
    assert res["pass"], res


def test_twisted_expansion_needs_rank_zero():
    with pytest.raises(RankNotZero):
        twisted_expansion(KClass(R, ["a"]), R.gen("b"), 4)


def test_chi_tables():
    P2 = chi_table("P2")
    t = P2.ring.gen("t")
    assert chi(P2, 1) == 1
    assert chi(P2, t) == 3
    assert chi(P2, t**2) == 6
    # O(-1) and O(-2) have no cohomology; O(-3) has h^2 = 1
    assert chi(P2, t**-1) == 0
    assert chi(P2, t**-2) == 0
    assert chi(P2, t**-3) == 1
    # O(d) in general: (d+1)(d+2)/2
    for d in range(-6, 7):
        assert chi(P2, t**d) == (d + 1) * (d + 2) // 2
    Q = chi_table("P1xP1")
    a, b = Q.ring.gen("a"), Q.ring.gen("b")
    for i, j in itertools.product(range(-3, 4), repeat=2):
        assert chi(Q, a**i * b**j) == (i + 1) * (j + 1)


def test_chi_rejects_formal_variables():
    P2 = chi_table("P2")
    with pytest.raises(UnknownMonomial):
        chi(P2, var(P2.ring, "x"))
    with pytest.raises(UnknownMonomial):
        chi_table("P3")
    assert preset("p2") == P2.ring
