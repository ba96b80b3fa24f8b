import pytest

from conftest import const, var
from khall.distcalc import ordered_double_expand, two_sided
from khall.errors import NotDivisible
from khall.hall import (
    HeckeSetup,
    _cover_divide,
    brute_force_commutator,
    commutator_parts,
    constant_sign,
    constant_term,
    drop_diagonal,
    h_function,
    hecke_kernel,
    residue_coefficients,
    rho,
    verify_commutator,
    w_factor,
    weyl_rank_check,
    xi_poles,
    xi_S,
    z_factor,
)
from khall.laurent import RatFun, substitute


@pytest.fixture(scope="module")
def s1():
    return HeckeSetup(1, "free", 6)


def test_xi_without_diagonal_is_one(s1):
    assert drop_diagonal(xi_S("x", s1)) == 1


def test_xi_clears_to_diagonal(s1):
    R = s1.ring
    x = var(R, "x")
    cleared = (xi_S(x, s1) - 1) * RatFun((1 - x) * (1 - s1.q * x))
    assert cleared == s1.D * x


def test_xi_poles(s1):
    poles = xi_poles(s1)
    assert poles == [const(s1.ring, 1), s1.q.unit_inverse()]
    # each pole is a zero of a denominator factor of xi
    x = var(s1.ring, "x")
    for p in poles:
        assert any(f.poly(s1.ring, ("x",)).substitute("x", p).is_zero() for f, _ in xi_S(x, s1).den)


def test_kernel_structure(s1):
    K = hecke_kernel(s1)
    sep = drop_diagonal(K).simplified()
    assert all(len(f.variables(s1.ring)) <= 1 for f, _ in sep.den)
    mixed = [f for f, _ in K.den if len(f.variables(s1.ring)) == 2]
    single = [f for f, _ in K.den if len(f.variables(s1.ring)) == 1]
    assert len(mixed) == 2 and len(single) == 1


def test_kernel_near_second_pole(s1):
    # (1 - q w/z) K at w = z/q is the second residue integrand
    R = s1.ring
    w, z, q = var(R, "w"), var(R, "z"), s1.q
    K = hecke_kernel(s1) * RatFun(1 - q * w * z.unit_inverse())
    lhs = substitute(K.simplified(), "w", z * q.unit_inverse())
    rhs = z_factor(s1) * substitute(w_factor(s1), "w", z * q.unit_inverse())
    rhs = rhs * RatFun(s1.D * q.unit_inverse()) * RatFun(1 - q.unit_inverse()).inverse()
    assert lhs == rhs


def test_residue_coefficients(s1):
    (a1, c1), (a2, c2) = residue_coefficients(s1)
    assert a1 == 1 and c1 == s1.D
    assert a2 == s1.q.unit_inverse() and c2 == -s1.D


@pytest.mark.parametrize("ring", ["free", "p2"])
def test_pole_sum_matches_brute_force(ring):
    s = HeckeSetup(1, ring, 6)
    parts = commutator_parts(s)
    total = parts[0][2] + parts[1][2]
    box = s.box()
    assert total.equals(brute_force_commutator(s), box)
    assert parts[1][2].is_zero(box)
    assert total.equals(rho(s), box)


def test_brute_force_shortcut_matches_full_expansions(s1):
    K = hecke_kernel(s1) * RatFun(s1.q - 1)
    full = ordered_double_expand(K, "w", "z", 6) - ordered_double_expand(K, "z", "w", 6)
    assert brute_force_commutator(s1).equals(full, s1.box())


def test_zero_class():
    s = HeckeSetup(0, "free", 5)
    z = var(s.ring, "z")
    assert h_function(s) == 1 - z.unit_inverse()
    assert two_sided(h_function(s), "z", 5).is_zero()
    assert rho(s).is_zero()
    assert constant_term(s).is_zero()


def test_h_under_delta_is_two_sided(s1):
    # the delta(w/z) coefficient pattern of rho is the two-sided expansion of h
    d = rho(s1)
    T = two_sided(h_function(s1), "z", 12, canonicalize=False)
    for k in range(-6, 7):
        got = d.coefficient({"z": k, "w": 0})
        assert got == s1.D * T.coefficient({"z": k})


@pytest.mark.parametrize("rank", [1, 2])
def test_torsion_constant_term_sign(rank):
    s = HeckeSetup(rank, "free", 6, "torsion")
    c = constant_term(s)
    assert constant_sign(s, c) == -1


def test_split_constant_term_is_divisible_but_not_a_unit_multiple(s1):
    c = constant_term(s1)
    assert constant_sign(s1, c) is None
    f = s1.ring.gen("f1_1")
    assert c == s1.D * s1.q.unit_inverse() * (1 - f.unit_inverse())


def test_not_divisible(s1):
    with pytest.raises(NotDivisible):
        _cover_divide(s1.D, s1.q - 1, "test value")


@pytest.mark.parametrize("d", range(1, 7))
def test_weyl_rank(d):
    absolute, raw = weyl_rank_check(d)
    assert absolute == d
    assert raw == -d


def test_report_passes():
    rep = verify_commutator(1, "free", 6)
    assert rep.passed
    names = [s.name for s in rep.stages]
    assert "brute-force" in names and "second-term-vanishes" in names
    js = rep.to_json()
    assert js["pass"] is True and js["setup"]["rank"] == 1
