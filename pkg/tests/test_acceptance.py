"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n: PASS`` or ``CRITERION n: FAIL`` line
to the terminal (outside pytest capture), then asserts.
"""

import itertools
import random
from contextlib import contextmanager

from khall.distcalc import exchange_defect, expand, ordered_double_expand
from khall.hall import (
    HeckeSetup,
    commutator_parts,
    constant_sign,
    constant_term,
    hecke_kernel,
    rho,
    weyl_rank_check,
)
from khall.kclass import KClass, wedge_series
from khall.laurent import LaurentPoly, RatFun
from khall.ring import Ring
from khall.shuffle import ShuffleElement, from_expression
from khall.suites import lemma_suite, residue_suite

SEED = 20240521


@contextmanager
def criterion(n, capsys, note=""):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            suffix = f" ({note})" if note and ok else ""
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'}{suffix}")


def h_k(values, k, ring):
    """Complete homogeneous polynomial, by brute force over multisets."""
    total = LaurentPoly.constant(ring, 0)
    for combo in itertools.combinations_with_replacement(values, k):
        term = LaurentPoly.constant(ring, 1)
        for v in combo:
            term = term * v
        total = total + term
    return total


def expansion_identities_hold(rng, ring, rank, order):
    lines = [ring.unit({g: rng.randint(-2, 2) for g in ring.gens}) for _ in range(rank)]
    P = KClass(ring, lines)
    f = RatFun(LaurentPoly.constant(ring, 1))
    for L in lines:
        f = f * wedge_series(KClass(ring, [L]), "x").inverse()
    zero = expand(f, "x", "zero", order)
    inf = expand(f, "x", "inf", order)
    inverses = [L.unit_inverse() for L in lines]
    det_dual = LaurentPoly.constant(ring, 1)
    for u in inverses:
        det_dual = det_dual * u
    for k in range(-order, order + 1):
        if zero.coefficient(k) != (h_k(lines, k, ring) if k >= 0 else 0):
            return False
        m = -k - rank
        want = (-1) ** rank * det_dual * h_k(inverses, m, ring) if m >= 0 else 0
        if inf.coefficient(k) != want:
            return False
    return P.rank == rank


def test_criterion_1_expansion_identities(capsys):
    with criterion(1, capsys):
        rng = random.Random(SEED)
        ring = Ring(["q", "u1", "u2"])
        for i in range(24):
            assert expansion_identities_hold(rng, ring, i % 4, 8), f"case {i}"


def test_criterion_2_calculation_lemma(capsys):
    with criterion(2, capsys):
        report = lemma_suite(SEED, 24, 8)
        assert report.passed, report.summary()


def test_criterion_3_residue_identity(capsys):
    with criterion(3, capsys):
        report = residue_suite(SEED, 16, 8)
        assert report.passed, report.summary()


def test_criterion_4_shuffle(capsys):
    with criterion(4, capsys):
        one, z = from_expression("1"), from_expression("z")
        assert (z * one).is_zero()
        assert one * z == from_expression("z1 + z2", 2)
        assert one * one == from_expression("1", 2)
        unit = ShuffleElement.one()
        gens = [from_expression(f"z^{a}") for a in range(-2, 3)]
        for g in gens:
            assert unit * g == g and g * unit == g
        for a, b, c in itertools.product(gens, repeat=3):
            assert (a * b) * c == a * (b * c)


def full_oracle(setup):
    K = hecke_kernel(setup) * RatFun(setup.q - 1)
    N = setup.order
    return ordered_double_expand(K, "w", "z", N) - ordered_double_expand(K, "z", "w", N)


def test_criterion_5_commutator(capsys):
    with criterion(5, capsys, "ranks 1, 2, 3"):
        for rank in (1, 2, 3):
            s = HeckeSetup(rank, "free", 8)
            box = s.box()
            parts = commutator_parts(s)
            total = parts[0][2] + parts[1][2]
            assert parts[1][0] == s.q.unit_inverse()
            assert parts[1][2].is_zero(box), f"rank {rank}"
            assert total.equals(rho(s), box), f"rank {rank}"
            assert total.equals(full_oracle(s), box), f"rank {rank}"


SIGN_SETUPS = [(1, "free"), (2, "free"), (3, "free"), (1, "p2")]


def test_criterion_6_constant_term_sign(capsys):
    # the unit-multiple property needs a rank-0 class, so it is checked on the
    # torsion model; for split classes the constant term is not such a multiple
    signs = {}
    with criterion(6, capsys, "torsion setups, sign -1 throughout"):
        for rank, ring in SIGN_SETUPS:
            s = HeckeSetup(rank, ring, 8, "torsion")
            signs[(rank, ring)] = constant_sign(s, constant_term(s))
        assert set(signs.values()) == {-1}, signs
        split = HeckeSetup(1, "free", 8)
        assert constant_sign(split, constant_term(split)) is None


def test_criterion_7_weyl_rank(capsys):
    with criterion(7, capsys):
        for d in range(1, 7):
            assert weyl_rank_check(d)[0] == d


def test_criterion_8_truncation(capsys):
    with criterion(8, capsys):
        low, high = residue_suite(SEED, 16, 8), residue_suite(SEED, 16, 12)
        assert low.passed and high.passed
        ring = Ring(["q", "u"])
        q, u = ring.gen("q"), ring.gen("u")
        one = LaurentPoly.constant(ring, 1)
        x = LaurentPoly.variable(ring, "x")
        y = LaurentPoly.variable(ring, "y")
        f = RatFun(one - u * x).inverse()
        g = RatFun(one - q * y.unit_inverse()).inverse()
        box8 = {"x": (-8, 8), "y": (-8, 8)}
        for alpha in (one, q.unit_inverse()):
            assert exchange_defect(f, g, alpha, 8).equals(exchange_defect(f, g, alpha, 12), box8)
        for rank in (1, 2, 3):
            s8, s12 = HeckeSetup(rank, "free", 8), HeckeSetup(rank, "free", 12)
            c8 = commutator_parts(s8)
            c12 = commutator_parts(s12)
            t8, t12 = c8[0][2] + c8[1][2], c12[0][2] + c12[1][2]
            assert t12.equals(rho(s12), s12.box())
            assert t8.equals(t12, s8.box())
        for rank, ring_name in SIGN_SETUPS[:3]:
            s8 = HeckeSetup(rank, ring_name, 8, "torsion")
            s12 = HeckeSetup(rank, ring_name, 12, "torsion")
            assert constant_term(s8) == constant_term(s12)
