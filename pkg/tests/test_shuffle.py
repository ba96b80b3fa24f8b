import itertools
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import const, var
from khall.errors import NotSymmetric
from khall.laurent import LaurentPoly, RatFun, symmetrize
from khall.ring import preset
from khall.shuffle import ShuffleElement, canonicalize, from_expression, zvars

Z = preset("z")


def elem(text, degree=None):
    return from_expression(text, degree)


def oracle(f: ShuffleElement, g: ShuffleElement) -> ShuffleElement:
    """Full symmetrization over S_{n+m} divided by n! m!."""
    n, m = f.degree, g.degree
    names = zvars(n + m)
    fs = f.poly.rename({f"z{i}": f"y{i}" for i in range(1, n + 1)})
    fs = fs.rename({f"y{i}": names[i - 1] for i in range(1, n + 1)})
    gs = g.poly.rename({f"z{j}": f"y{j}" for j in range(1, m + 1)})
    gs = gs.rename({f"y{j}": names[n + j - 1] for j in range(1, m + 1)})
    h = RatFun(fs) * RatFun(gs)
    for i in range(n):
        for j in range(n, n + m):
            zi, zj = var(Z, names[i]), var(Z, names[j])
            h = h * RatFun(const(Z, 1) - zi * zj.unit_inverse()).inverse()
    total = symmetrize(h, names).simplified().as_polynomial()
    k = factorial(n) * factorial(m)
    assert all(c % k == 0 for c in total.terms.values())
    quot = {a: c // k for a, c in total.terms.items()}
    return ShuffleElement(n + m, LaurentPoly(Z, total.vars, quot))


def test_degree_one_products():
    one, z = elem("1"), elem("z")
    assert one * one == 1
    assert (z * one).is_zero()
    assert str(one * z) == "z1 + z2"
    assert z * one != one * z


def test_canonicalize():
    z1, z2 = var(Z, "z1"), var(Z, "z2")
    assert canonicalize(z1 + z2).degree == 2
    with pytest.raises(NotSymmetric):
        canonicalize(z1, 2)
    assert canonicalize(5).degree == 0


def test_unit_laws():
    unit = ShuffleElement.one()
    for text in ("z^2", "z^-1", "z1*z2", "z1 + z2"):
        f = elem(text)
        assert unit * f == f
        assert f * unit == f


gens = st.integers(-2, 2).map(lambda a: elem(f"z^{a}"))


@settings(max_examples=40, deadline=None)
@given(gens, gens, gens)
def test_associativity(f, g, h):
    assert (f * g) * h == f * (g * h)


@settings(max_examples=20, deadline=None)
@given(gens, gens, gens, st.integers(-3, 3))
def test_bilinearity(f, g, h, c):
    assert (f + f) * h == f * h + f * h
    assert (c * f) * h == c * (f * h)
    assert f * (g + h) == f * g + f * h


@settings(max_examples=15, deadline=None)
@given(gens, gens)
def test_against_symmetrization_oracle(f, g):
    assert f * g == oracle(f, g)


def test_higher_degree_against_oracle():
    f = elem("z1 + z2")
    g = elem("z^-1")
    assert f * g == oracle(f, g)
    assert g * f == oracle(g, f)
    assert len(list(itertools.permutations(range(3)))) == 6


def test_json_listing():
    js = (elem("1") * elem("z")).to_json()
    assert js["degree"] == 2
    assert sorted(t["multidegree"] for t in js["terms"]) == [[0, 1], [1, 0]]
