"""Seeded randomized checks behind ``residue-check`` and ``verify lemma-calculation``.

Every suite draws its cases from ``random.Random(seed)`` so that a report is
reproducible from ``(seed, count, order)``.
"""

from __future__ import annotations

import itertools
import random
import time

from .distcalc import exchange_defect, expand, ordered_double_expand
from .kclass import KClass, calculation_lemma_check, sym_series
from .laurent import LaurentPoly, RatFun
from .report import DerivationReport
from .ring import Ring

DEFAULT_SEED = 20240521


def suite_ring(ngens: int = 3) -> Ring:
    """Free ring on the units ``q, u1..u_{n-1}`` used by the random suites."""
    return Ring(["q"] + [f"u{i}" for i in range(1, ngens)], label="free")


def random_line(rng: random.Random, ring: Ring, spread: int = 2) -> LaurentPoly:
    exps = {g: rng.randint(-spread, spread) for g in ring.gens}
    return ring.unit(exps)


def random_one_variable(rng: random.Random, ring: Ring, var: str, max_factors: int = 2) -> RatFun:
    """A numerator with small coefficients over at most ``max_factors`` binomials ``1 - c v^{+-1}``."""
    one = LaurentPoly.constant(ring, 1)
    v = LaurentPoly.variable(ring, var)
    num = one
    for _ in range(rng.randint(0, 2)):
        num = num + rng.randint(-2, 2) * v ** rng.randint(-2, 2)
    if num.is_zero():
        num = one
    out = RatFun(num)
    for _ in range(rng.randint(0, max_factors)):
        c = random_line(rng, ring, 1)
        out = out * RatFun(one - c * v ** rng.choice([1, -1])).inverse()
    return out


def residue_suite(seed: int = DEFAULT_SEED, count: int = 12, order: int = 8) -> DerivationReport:
    """Exchange defect against the difference of ordered double expansions."""
    start = time.perf_counter()
    rng = random.Random(seed)
    ring = suite_ring(2)
    q = ring.gen("q")
    one = LaurentPoly.constant(ring, 1)
    x, y = LaurentPoly.variable(ring, "x"), LaurentPoly.variable(ring, "y")
    report = DerivationReport("residue-check", {"seed": seed, "count": count, "order": order, "ring": "free"})
    box = {"x": (-order, order), "y": (-order, order)}
    for i in range(count):
        alpha = one if i % 2 == 0 else q.unit_inverse()
        f = random_one_variable(rng, ring, "x")
        g = random_one_variable(rng, ring, "y")
        K = f * g * RatFun(y * x.unit_inverse() - alpha).inverse()
        lhs = ordered_double_expand(K, "x", "y", order) - ordered_double_expand(K, "y", "x", order)
        rhs = exchange_defect(f, g, alpha, order)
        report.add(f"case-{i}", lhs.equals(rhs, box), f"alpha = {alpha}; f = {f}; g = {g}", box)
    report.timing = time.perf_counter() - start
    return report


def random_rank_zero(rng: random.Random, ring: Ring, max_plus: int = 3) -> KClass:
    k = rng.randint(1, max_plus)
    plus = [random_line(rng, ring) for _ in range(k)]
    minus = [random_line(rng, ring) for _ in range(k)]
    return KClass(ring, plus, minus)


def lemma_suite(seed: int = DEFAULT_SEED, count: int = 12, order: int = 8) -> DerivationReport:
    """The ``x^-1`` and ``x^1`` coefficients of the twisted two-sided expansion."""
    start = time.perf_counter()
    rng = random.Random(seed)
    ring = suite_ring(3)
    report = DerivationReport("verify lemma-calculation", {"seed": seed, "count": count, "order": order, "ring": "free"})
    for i in range(count):
        P = random_rank_zero(rng, ring)
        L = random_line(rng, ring)
        res = calculation_lemma_check(P, L, order)
        report.add(f"case-{i}", res["pass"], f"P = {P}; L = {L}")
    report.timing = time.perf_counter() - start
    return report


def complete_homogeneous(roots, k: int, ring: Ring) -> LaurentPoly:
    """``h_k`` of the given ring elements, summed over multisets."""
    total = LaurentPoly.constant(ring, 0)
    for combo in itertools.combinations_with_replacement(range(len(roots)), k):
        term = LaurentPoly.constant(ring, 1)
        for j in combo:
            term = term * roots[j]
        total = total + term
    return total


def expansion_identity_check(P: KClass, order: int = 8, var: str = "x") -> bool:
    """``1/wedge(P x)`` at zero and at infinity against the ``h_k`` closed forms."""
    ring = P.ring
    if P.minus:
        raise ValueError("expected an effective split class")
    roots = [LaurentPoly(ring, (), {k: 1}) for _, k in P.elements()]
    r = len(roots)
    f = sym_series(P, var)
    zero = expand(f, var, "zero", order)
    inf = expand(f, var, "inf", order)
    dets = P.dual().det()
    sign = -1 if r % 2 else 1
    inv_roots = [u.unit_inverse() for u in roots]
    for k in range(-order, order + 1):
        want_zero = complete_homogeneous(roots, k, ring) if k >= 0 else 0
        if zero.coefficient(k) != want_zero:
            return False
        m = -k - r
        want_inf = dets * complete_homogeneous(inv_roots, m, ring) * sign if m >= 0 else 0
        if inf.coefficient(k) != want_inf:
            return False
    return True


def expansion_suite(seed: int = DEFAULT_SEED, count: int = 12, order: int = 8) -> DerivationReport:
    start = time.perf_counter()
    rng = random.Random(seed)
    ring = suite_ring(3)
    report = DerivationReport("verify expansion", {"seed": seed, "count": count, "order": order, "ring": "free"})
    for i in range(count):
        r = i % 4
        P = KClass(ring, [random_line(rng, ring) for _ in range(r)])
        report.add(f"case-{i}", expansion_identity_check(P, order), f"P = {P}")
    report.timing = time.perf_counter() - start
    return report
