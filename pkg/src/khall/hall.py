"""The Hecke commutator computed with formal distributions.

A :class:`HeckeSetup` fixes a model of the class ``F`` (a split K-class with
Chern roots ``f_i``), the unit ``q`` and the truncation order.  Two tagged
copies ``f1_i`` and ``f2_i`` of the roots are adjoined together with the
diagonal marker ``D``; terms containing ``D`` identify ``f2_i`` with ``f1_i``.

The kernel is

    K(z, w) = wedge(F1 / (w q)) * wedge(-I2 / z) * xi(w / z),
    xi(x)   = 1 + D x / ((1 - x)(1 - q x)),

with ``I = F - [1]``.  The commutator is the difference of the two ordered
double expansions of ``K`` (``w`` first minus ``z`` first).  It only sees
the poles of ``xi``, so it is a sum of delta terms at ``w = z`` and
``w = z/q``.  All distributions here are multiplied by ``q - 1`` so that
every coefficient stays in the ring.
"""

from __future__ import annotations

import time

from .distcalc import (
    INF,
    ZERO,
    FormalDist,
    default_order,
    delta,
    delta_bracket,
    dist_mul,
    ordered_difference,
)
from .errors import KhallError, NotDivisible
from .kclass import KClass, chi, chi_table, wedge_series
from .laurent import LaurentPoly, RatFun, exact_divide_terms
from .report import DerivationReport
from .ring import Ring

MODELS = ("split", "torsion")
RINGS = ("free", "p2")


def hecke_ring(rank: int, ring: str = "free") -> Ring:
    """Base ring with the tagged roots and the diagonal marker adjoined."""
    if ring == "free":
        base = [("q", True)]
        rels = {}
        label = "free"
    elif ring == "p2":
        base = [("t", True)]
        rels = {"t": [-1, 3, -3, 1]}
        label = "P2"
    else:
        raise KhallError(f"unknown ring preset {ring!r} (expected free or p2)")
    gens = list(base)
    gens += [(f"f1_{i}", True) for i in range(1, rank + 1)]
    gens += [(f"f2_{i}", True) for i in range(1, rank + 1)]
    gens.append(("D", False))
    ident = [(f"f2_{i}", f"f1_{i}") for i in range(1, rank + 1)]
    return Ring(gens, rels, marker="D", identify=ident, label=label)


class HeckeSetup:
    """Inputs of the commutator computation.

    ``model="split"`` takes ``F = [f_1] + ... + [f_r]`` (rank ``r``), while
    ``model="torsion"`` takes ``F = sum ([1] - [f_i])`` (rank 0), the class
    of a sheaf supported in codimension one.
    """

    def __init__(self, rank: int, ring: str = "free", order: int | None = None, model: str = "split"):
        if rank < 0:
            raise KhallError("rank must be non-negative")
        if model not in MODELS:
            raise KhallError(f"unknown model {model!r} (expected split or torsion)")
        self.rank = rank
        self.preset = ring
        self.model = model
        self.order = default_order() if order is None else order
        self.ring = hecke_ring(rank, ring)
        R = self.ring
        if ring == "free":
            self.q = R.gen("q")
        else:
            # q is the canonical class, [O(-3)] on the plane
            self.q = R.unit({"t": -3})
        self.F1 = self._model_class(1)
        self.F2 = self._model_class(2)

    def _model_class(self, tag: int) -> KClass:
        R = self.ring
        roots = [f"f{tag}_{i}" for i in range(1, self.rank + 1)]
        if self.model == "split":
            return KClass(R, roots)
        return KClass(R, [1] * self.rank, roots)

    @property
    def F(self) -> KClass:
        return self.F1

    @property
    def I_shift(self) -> KClass:
        return self.F2 - KClass.one(self.ring)

    @property
    def D(self) -> LaurentPoly:
        return self.ring.gen("D")

    def box(self, order=None) -> dict:
        N = self.order if order is None else order
        return {"z": (-N, N), "w": (-N, N)}

    def describe(self) -> dict:
        return {
            "rank": self.rank,
            "ring": self.preset,
            "model": self.model,
            "order": self.order,
            "F": str(self.F),
            "q": str(self.q),
        }

    def __repr__(self):
        return f"HeckeSetup(rank={self.rank}, ring={self.preset!r}, order={self.order}, model={self.model!r})"


def _var(ring, name):
    return LaurentPoly.variable(ring, name)


def xi_S(x, setup: HeckeSetup) -> RatFun:
    """``1 + D x / ((1 - x)(1 - q x))`` for a monomial argument ``x``."""
    R = setup.ring
    if isinstance(x, str):
        x = _var(R, x)
    one = LaurentPoly.constant(R, 1)
    a = RatFun(one - x).inverse()
    b = RatFun(one - setup.q * x).inverse()
    return RatFun(one) + RatFun(setup.D * x) * a * b


def xi_poles(setup: HeckeSetup) -> list:
    """Poles of ``xi`` in its argument: ``1`` and ``q^-1``."""
    return [LaurentPoly.constant(setup.ring, 1), setup.q.unit_inverse()]


def w_factor(setup: HeckeSetup) -> RatFun:
    """``wedge(F1 / (w q))``."""
    return wedge_series(setup.F1, "w", scale=setup.q.unit_inverse(), power=-1)


def z_factor(setup: HeckeSetup) -> RatFun:
    """``wedge(-I2 / z)``."""
    return wedge_series(-setup.I_shift, "z", power=-1)


def hecke_kernel(setup: HeckeSetup) -> RatFun:
    R = setup.ring
    x = _var(R, "w") * _var(R, "z").unit_inverse()
    return w_factor(setup) * z_factor(setup) * xi_S(x, setup)


def drop_diagonal(f):
    """Set ``D = 0`` in a ring element, Laurent polynomial or rational function."""
    if isinstance(f, RatFun):
        num = drop_diagonal(f.num)
        return f._with(num, dict(f.den), f.const)
    ring = f.ring
    m = ring.marker
    if m is None:
        return f
    return LaurentPoly(ring, f.vars, {k: c for k, c in f.terms.items() if k[m] == 0})


def _cover_divide(p: LaurentPoly, d: LaurentPoly, what: str) -> LaurentPoly:
    """Exact quotient in the relation-free cover, then reduced."""
    ring = p.ring
    cover = ring.cover()
    num = cover.reduce_terms(p.terms)
    den = cover.reduce_terms(d.terms)
    quot = exact_divide_terms(num, den)
    if quot is None:
        raise NotDivisible(f"{what} is not divisible by {LaurentPoly(ring, d.vars, den)}")
    return LaurentPoly(ring, p.vars, quot).normalized()


def residue_coefficients(setup: HeckeSetup) -> list:
    """``[(alpha, (q - 1) Res_{x=alpha} xi(x) / alpha)]`` for the poles of ``xi``.

    With ``xi - 1 = D x / ((1 - x)(1 - q x))`` and ``alpha = 1/u`` the residue
    times ``1/alpha`` is ``-P(alpha) / prod_{u' != u} (1 - u' alpha)``.
    """
    R = setup.ring
    one = LaurentPoly.constant(R, 1)
    us = [one, setup.q]
    out = []
    for i, u in enumerate(us):
        alpha = u.unit_inverse()
        num = -(setup.q - 1) * setup.D * alpha
        den = one
        for j, v in enumerate(us):
            if j != i:
                den = den * (one - v * alpha)
        out.append((alpha, _cover_divide(num, den, "residue coefficient")))
    return out


def commutator_parts(setup: HeckeSetup, order: int | None = None) -> list:
    """``[(alpha, cleared coefficient, distribution)]``, one entry per pole."""
    N = setup.order if order is None else order
    fz, gw = z_factor(setup), w_factor(setup)
    parts = []
    for alpha, c in residue_coefficients(setup):
        # scaling the numerator is cheaper than scaling the expansion
        bracket = delta_bracket(fz * RatFun(c), gw, alpha, N, x="z", y="w")
        parts.append((alpha, c, bracket))
    return parts


def commutator_dist(setup: HeckeSetup, order: int | None = None) -> FormalDist:
    """``(q - 1) [mu+(z), mu-(w)]`` assembled from the pole contributions."""
    parts = commutator_parts(setup, order)
    total = parts[0][2]
    for _, _, d in parts[1:]:
        total = total + d
    return total


def brute_force_commutator(setup: HeckeSetup, order: int | None = None) -> FormalDist:
    """The same distribution from the two ordered double expansions of the kernel."""
    N = setup.order if order is None else order
    K = hecke_kernel(setup)
    return ordered_difference(K * RatFun(setup.q - 1), "w", "z", N)


def h_function(setup: HeckeSetup, var: str = "z") -> RatFun:
    """``(1 - 1/v) wedge((q^-1 - 1) F / v)``."""
    R = setup.ring
    F = setup.F1
    twisted = F * setup.q.unit_inverse() - F
    one = LaurentPoly.constant(R, 1)
    return RatFun(one - _var(R, var).unit_inverse()) * wedge_series(twisted, var, power=-1)


def rho(setup: HeckeSetup, order: int | None = None) -> FormalDist:
    """``(q - 1) rho(z, w) = D delta(w/z) (h+(z) - h-(w))``."""
    N = setup.order if order is None else order
    R = setup.ring
    box = setup.box(N)
    dl = delta(_var(R, "w") * _var(R, "z").unit_inverse(), R, box)
    plus = dist_mul(dl, h_function(setup, "z"), at=INF)
    minus = dist_mul(dl, h_function(setup, "w"), at=ZERO)
    return (plus - minus).scale(setup.D).with_box(box)


def dual_element(setup: HeckeSetup) -> LaurentPoly:
    return setup.D * setup.F1.dual().element()


def constant_term(setup: HeckeSetup, order: int | None = None) -> LaurentPoly:
    """The ``z^0 w^0`` coefficient of rho, divided exactly by ``q - 1``."""
    raw = rho(setup, order).coefficient({"z": 0, "w": 0}, reduce=False)
    return _cover_divide(raw, setup.q - 1, "constant term")


def constant_sign(setup: HeckeSetup, value: LaurentPoly | None = None):
    """``s`` with ``constant_term == s * D * F^dual``, or None if there is no such sign."""
    value = constant_term(setup) if value is None else value
    target = dual_element(setup).normalized()
    if target.is_zero():
        return 1 if value.is_zero() else None
    for s in (1, -1):
        if value == target * s:
            return s
    return None


def weyl_rank_check(d: int, table: str = "P2"):
    """``(|chi|, chi)`` of ``(E1 E2 omega) F^dual`` for a degree-``d`` plane curve.

    ``E1 = [1]``, ``E2 = [1] - [t^-1]``, ``omega = [t^-3]`` and
    ``F = [1] - [t^-d]``.
    """
    if d < 1:
        raise KhallError("degree must be positive")
    tab = chi_table(table)
    R = tab.ring
    E1 = KClass.one(R)
    E2 = KClass(R, [1], ["t^-1"])
    omega = KClass(R, ["t^-3"])
    F = KClass(R, [1], [f"t^-{d}"])
    value = chi(tab, (E1 * E2 * omega * F.dual()).element())
    return abs(value), value


def setup_notes(setup: HeckeSetup) -> list:
    """Modelling choices that a reader of a report should know about."""
    if setup.preset == "free":
        ring = "ring preset 'free': q and the roots of F are free units (a chosen model of the base)"
    else:
        ring = "ring preset 'p2': Z[t^+-1]/(t-1)^3 with q = t^-3 (a chosen model of the base)"
    return [
        ring,
        f"F is modelled as {setup.F} ({setup.model} model)",
        "two-sided expansion acts termwise on tails; delta factors pass through unchanged",
        "every class is treated as perfect; that distinction is not modelled",
    ]


def verify_commutator(rank: int, ring: str = "free", order: int | None = None, model: str = "split") -> DerivationReport:
    """Run every stage of the commutator computation and collect the outcome."""
    start = time.perf_counter()
    setup = HeckeSetup(rank, ring, order, model)
    report = DerivationReport("verify commutator", setup.describe())
    box = setup.box()
    R = setup.ring

    K = hecke_kernel(setup)
    poles = xi_poles(setup)
    sep = drop_diagonal(K).simplified()
    separable = all(len(f.variables(R)) <= 1 for f, _ in sep.den)
    report.add("kernel", separable and len(poles) == 2,
               f"poles of xi at {', '.join(str(p) for p in poles)}; D = 0 part separable")

    parts = commutator_parts(setup)
    total = parts[0][2] + parts[1][2]
    brute = brute_force_commutator(setup)
    report.add("brute-force", total.equals(brute, box),
               "pole sum equals the difference of ordered double expansions", box)

    second = parts[1][2]
    report.add("second-term-vanishes", second.is_zero(box),
               f"delta(w/(alpha z)) term with alpha = {parts[1][0]} is zero", box)

    r = rho(setup)
    report.add("gamma-form", parts[0][2].equals(r, box),
               "delta(w/z) term equals D delta(w/z)(h+(z) - h-(w))", box)
    report.add("commutator-equals-rho", total.equals(r, box), "", box)

    def weight(dl):
        # delta(var/u): (z, w)-degree of the argument
        return (dl.var in ("z", "w")) - sum(e for v, e in dl.mono if v in ("z", "w"))

    weights = all(weight(dl) == 0 for t in r.terms for dl in t.deltas)
    report.add("grading", weights, "every delta argument has total (z, w)-weight 0")

    try:
        c = constant_term(setup)
        report.add("divisibility", True, "z^0 w^0 coefficient divisible by q - 1")
        sign = constant_sign(setup, c)
        report.results["constant_term"] = str(c)
        report.results["dual_class"] = str(dual_element(setup).normalized())
        report.results["sign"] = sign
        if model == "torsion":
            report.add("constant-term", sign is not None,
                       f"constant term = {sign} * D * F^dual" if sign else "not a unit multiple of D * F^dual")
    except NotDivisible as exc:
        report.add("divisibility", False, str(exc))

    report.notes.extend(setup_notes(setup))
    report.timing = time.perf_counter() - start
    return report
