import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import const, var
from khall.distcalc import (
    FormalDist,
    delta,
    delta_bracket,
    dist_mul,
    exchange_defect,
    expand,
    ordered_difference,
    ordered_double_expand,
    two_sided,
)
from khall.errors import (
    DeltaSquare,
    IllDefinedProduct,
    IncompatibleTruncation,
    InconsistentSupport,
    TruncationError,
)
from khall.laurent import RatFun
from khall.ring import Ring


def inv(p):
    return RatFun(p).inverse()


def test_expand_geometric_series(free2):
    x, u = var(free2, "x"), free2.gen("u")
    f = inv(1 - u * x)
    s = expand(f, "x", "zero", 3)
    assert [s.coefficient(k) for k in range(4)] == [1, u, u**2, u**3]
    assert s.coefficient(-1) == 0
    s = expand(f, "x", "inf", 3)
    assert [s.coefficient(-k) for k in (1, 2, 3)] == [-(u**-1), -(u**-2), -(u**-3)]
    with pytest.raises(TruncationError):
        s.coefficient(-4)


def test_series_product_rules(free2):
    x = var(free2, "x")
    a = expand(inv(1 - x), "x", "zero", 4)
    exact = expand(RatFun(1 + x), "x", "zero", 4)
    prod = a * exact
    assert prod.coefficient(2) == 2
    with pytest.raises(IncompatibleTruncation):
        a * a


def test_two_sided_simple_poles(free2):
    x = var(free2, "x")
    assert str(two_sided(inv(x - 1), "x", 5)) == "delta(x)"
    assert str(two_sided(inv(1 - x), "x", 5)) == "-delta(x)"
    assert two_sided(RatFun(1 - x.unit_inverse()), "x", 5).is_zero()


def test_two_sided_matches_definition(free2):
    x, u = var(free2, "x"), free2.gen("u")
    f = inv(1 - u * x) * inv(1 - x)
    d = two_sided(f, "x", 6)
    for k in range(-6, 7):
        want = expand(f, "x", "inf", 6).coefficient(k) - expand(f, "x", "zero", 6).coefficient(k)
        assert d.coefficient({"x": k}) == want


def test_delta_kills_its_zero(free2):
    x = var(free2, "x")
    d = delta(x, free2, {"x": (-5, 5)})
    assert dist_mul(d, x - 1).is_zero()
    assert not dist_mul(d, x - 2).is_zero()


def test_delta_substitution(free2):
    w, z = var(free2, "w"), var(free2, "z")
    box = {"w": (-4, 4), "z": (-4, 4)}
    d = delta(w * z.unit_inverse(), free2, box)
    f = w**2 + 3 * w.unit_inverse()
    g = z**2 + 3 * z.unit_inverse()
    assert dist_mul(d, f).equals(dist_mul(d, g), box)


def test_delta_squares_are_refused(free2):
    x, u = var(free2, "x"), free2.gen("u")
    d = delta(x, free2, {"x": (-3, 3)})
    with pytest.raises(DeltaSquare):
        d * d
    with pytest.raises(InconsistentSupport):
        d * delta(x * u, free2, {"x": (-3, 3)})


def test_rational_product_needs_direction(free2):
    w, z = var(free2, "w"), var(free2, "z")
    d = delta(w * z.unit_inverse(), free2, {"w": (-3, 3), "z": (-3, 3)})
    with pytest.raises(IllDefinedProduct):
        dist_mul(d, inv(1 - z))


def test_ordered_double_expand_of_exchange_kernel(free2):
    # the first stage already is -delta(x/y); the second stage expands its
    # constant tail on both sides, and p - p = 0
    x, y = var(free2, "x"), var(free2, "y")
    f = inv(y * x.unit_inverse() - 1)
    assert str(two_sided(f, "x", 5)) == "-delta(x/y)"
    assert ordered_double_expand(f, "x", "y", 5).is_zero()
    assert ordered_double_expand(f, "y", "x", 5).is_zero()


def test_exchange_defect_examples(free2):
    x, y = var(free2, "x"), var(free2, "y")
    one = const(free2, 1)
    d = exchange_defect(inv(1 - x), RatFun(one), one, 4)
    assert str(d) == "delta(x)*delta(y)"
    box = {"x": (-4, 4), "y": (-4, 4)}
    K = inv(1 - x) * inv(y * x.unit_inverse() - 1)
    diff = ordered_double_expand(K, "x", "y", 4) - ordered_double_expand(K, "y", "x", 4)
    assert diff.equals(d, box)


def test_delta_bracket_scaling(free2):
    x, q = var(free2, "x"), free2.gen("q")
    f, g = inv(1 - x), RatFun(const(free2, 1))
    alpha = q.unit_inverse()
    assert exchange_defect(f, g, alpha, 4).equals(delta_bracket(f, g, alpha, 4).scale(-q))


def test_ordered_difference_skips_cancelling_regions(free2):
    x, y, u = var(free2, "x"), var(free2, "y"), free2.gen("u")
    K = inv(1 - u * x) * inv(1 - y.unit_inverse()) * inv(y * x.unit_inverse() - u)
    full = ordered_double_expand(K, "x", "y", 5) - ordered_double_expand(K, "y", "x", 5)
    assert ordered_difference(K, "x", "y", 5).equals(full)


def test_zero_distribution_and_json(free2):
    z = FormalDist.zero(free2, {"x": (-2, 2)})
    assert z.is_zero()
    x = var(free2, "x")
    js = two_sided(inv(x - 1), "x", 2).to_json()
    assert js["coefficients"]


R = Ring(["u"], label="free")
units = st.integers(-2, 2)


@settings(max_examples=40, deadline=None)
@given(units, st.sampled_from([1, -1]), st.integers(2, 6))
def test_truncation_coherence(a, e, n):
    # raising the order never changes coefficients already certified
    x = var(R, "x")
    f = inv(1 - R.gen("u") ** a * x**e) * inv(1 - x)
    lo = two_sided(f, "x", n)
    hi = two_sided(f, "x", n + 3)
    for k in range(-n, n + 1):
        assert lo.coefficient({"x": k}) == hi.coefficient({"x": k})
    for d in ("zero", "inf"):
        s1, s2 = expand(f, "x", d, n), expand(f, "x", d, n + 3)
        assert all(s1.coefficient(k) == s2.coefficient(k) for k in range(-n, n + 1))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), max_size=4))
def test_delta_substitution_property(items):
    w, z = var(R, "w"), var(R, "z")
    box = {"w": (-3, 3), "z": (-3, 3)}
    d = delta(w * z.unit_inverse(), R, box)
    f = sum((c * w**e for c, e in items), const(R, 0))
    g = sum((c * z**e for c, e in items), const(R, 0))
    assert dist_mul(d, f).equals(dist_mul(d, g), box)
