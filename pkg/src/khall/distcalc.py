"""Expansions at x = oo and x = 0, formal deltas and two-variable distributions.

The workhorse is :func:`region_expand`.  A *region* is an ordered list of
``(variable, direction)`` pairs, read lexicographically: the first variable
dominates.  Every denominator binomial ``1 - c*m`` is expanded as a geometric
series in whichever of ``c*m`` or ``(c*m)^-1`` is small in that region, and
the product is computed exactly on a finite box of exponents.  A one-variable
region gives the usual expansions; the two-variable regions give the ordered
double expansions ("first in x, then in y").

Distributions are finite sums of terms ``delta(v1/u1) ... delta(vj/uj) * T``
where every ``vi`` has been eliminated (it no longer occurs in any ``u`` or in
``T``) and ``T`` is a Laurent polynomial that is either exact or known only
on a window of exponents.  Coefficients are extracted on demand; asking for
one that the window does not certify raises :class:`TruncationError`.
"""

from __future__ import annotations

import itertools
import os
from operator import add

from .errors import (
    DeltaSquare,
    IllDefinedProduct,
    IncompatibleTruncation,
    InconsistentSupport,
    KhallError,
    NotDivisible,
    NotPolynomial,
    TruncationError,
    UnfactoredDenominator,
)
from .laurent import (
    Binomial,
    GeneralFactor,
    LaurentPoly,
    RatFun,
    format_terms,
    key_to_mono,
    mono_to_key,
    sort_vars,
    substitute,
)

INF = "inf"
ZERO = "zero"
DEFAULT_ORDER = 8

_DIRECTIONS = {
    "inf": INF,
    "infinity": INF,
    "at-infinity": INF,
    "oo": INF,
    "zero": ZERO,
    "0": ZERO,
    "at-zero": ZERO,
}


def direction(d) -> str:
    try:
        return _DIRECTIONS[str(d).lower()]
    except KeyError:
        raise ValueError(f"unknown expansion direction {d!r}") from None


def default_order() -> int:
    """Truncation order: ``KHALL_ORDER`` if set, else 8."""
    env = os.environ.get("KHALL_ORDER")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"KHALL_ORDER must be an integer, got {env!r}") from None
        if n < 0:
            raise ValueError("KHALL_ORDER must be non-negative")
        return n
    return DEFAULT_ORDER


def _as_ratfun(f, ring=None):
    if isinstance(f, RatFun):
        return f
    if isinstance(f, LaurentPoly):
        return RatFun(f)
    return RatFun.coerce(f, ring)


# ---------------------------------------------------------------------------
# the expansion engine


def region_expand(f, region, box) -> LaurentPoly:
    """Exact expansion of ``f`` in ``region`` restricted to ``box``.

    ``region`` is a list of ``(var, direction)``; ``box`` maps each region
    variable to an inclusive exponent range.  Other variables may occur in the
    numerator (or inside a binomial together with a region variable) but not
    alone in a denominator.
    """
    f = _as_ratfun(f)
    ring = f.ring
    region = [(v, direction(d)) for v, d in region]
    rvars = [v for v, _ in region]
    if len(set(rvars)) != len(rvars):
        raise ValueError("a variable occurs twice in the region")
    vars = sort_vars(f.vars + tuple(rvars))
    n = ring.ngens
    pos = [n + vars.index(v) for v in rvars]
    sig = [-1 if d == INF else 1 for _, d in region]
    tbox = []
    for v, d in region:
        lo, hi = box[v]
        tbox.append((lo, hi) if d == ZERO else (-hi, -lo))

    width = n + len(vars)
    pre_key = [0] * width
    pre_sign = 1
    groups = [[] for _ in region]
    for fac, mult in f.den:
        if isinstance(fac, GeneralFactor):
            raise UnfactoredDenominator(
                f"denominator factor ({fac.poly(ring, vars).trimmed()}) is not of the form 1 - u*m"
            )
        k = mono_to_key(ring, vars, fac.mono)
        g = next((i for i, p in enumerate(pos) if k[p]), None)
        if g is None:
            if any(k[n:]):
                raise UnfactoredDenominator(
                    f"denominator factor ({fac.poly(ring, vars).trimmed()}) is rational in variables outside the region"
                )
            raise UnfactoredDenominator(
                f"constant denominator factor ({fac.poly(ring, vars).trimmed()}) is not a unit"
            )
        s = fac.sign
        if sig[g] * k[pos[g]] > 0:
            ratio = (s, k)
        else:
            # 1/(1 - s M) = -s M^-1 / (1 - s M^-1)
            for _ in range(mult):
                pre_key = [a - b for a, b in zip(pre_key, k)]
                pre_sign *= -s
            ratio = (s, tuple(-e for e in k))
        groups[g].extend([ratio] * mult)

    num = f.num.with_vars(vars)
    terms = {tuple(map(add, k, pre_key)): c * pre_sign for k, c in num.terms.items()}
    for g, p in enumerate(pos):
        sg = sig[g]
        lo, hi = tbox[g]
        terms = {k: c for k, c in terms.items() if sg * k[p] <= hi}
        for s, rk in groups[g]:
            acc = dict(terms)
            cur = terms
            step = sg * rk[p]
            while cur:
                nxt = {}
                for k, c in cur.items():
                    if sg * k[p] + step > hi:
                        continue
                    nxt[tuple(map(add, k, rk))] = c * s
                cur = nxt
                for k, c in cur.items():
                    v = acc.get(k, 0) + c
                    if v:
                        acc[k] = v
                    else:
                        acc.pop(k, None)
            terms = acc
        terms = {k: c for k, c in terms.items() if sg * k[p] >= lo}
    out = LaurentPoly._wrap(ring, vars, terms)
    if f.const != 1:
        red = out.normalized()
        if any(c % f.const for c in red.terms.values()):
            raise NotDivisible(f"expansion coefficients are not divisible by {f.const}")
        out = LaurentPoly(ring, vars, {k: c // f.const for k, c in red.terms.items()}, reduced=True)
    return out


class Series:
    """One-sided expansion of a rational function in ``var``, kept for ``|k| <= order``."""

    def __init__(self, var, dir, poly: LaurentPoly, order: int, window=None, exact=False):
        self.var = var
        self.exact = exact
        self.direction = direction(dir)
        self.poly = poly
        self.order = order
        self.window = window if window is not None else (-order, order)

    @property
    def ring(self):
        return self.poly.ring

    def coefficients(self) -> dict:
        """``{k: coefficient of var^k}`` for the stored (non-zero) terms."""
        return {k: c for k, c in self.poly.coefficient_map(self.var).items() if not c.is_zero()}

    def coefficient(self, k: int) -> LaurentPoly:
        lo, hi = self.window
        if not lo <= k <= hi:
            raise TruncationError(f"coefficient of {self.var}^{k} is outside the window [{lo}, {hi}]")
        m = self.poly.coefficient_map(self.var)
        rest = tuple(v for v in self.poly.vars if v != self.var)
        return m.get(k, LaurentPoly(self.ring, rest, {}))

    def _check(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        if other.var != self.var or other.direction != self.direction:
            raise KhallError("series in different variables or directions cannot be combined")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        lo = max(self.window[0], other.window[0])
        hi = min(self.window[1], other.window[1])
        poly = _clip(self.poly + other.poly, self.var, lo, hi)
        return Series(self.var, self.direction, poly, min(self.order, other.order), (lo, hi), self.exact and other.exact)

    def __neg__(self):
        return Series(self.var, self.direction, -self.poly, self.order, self.window, self.exact)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int) or (isinstance(other, LaurentPoly) and self.var not in other.vars):
            return Series(self.var, self.direction, self.poly * other, self.order, self.window, self.exact)
        if isinstance(other, LaurentPoly):
            other = Series(self.var, self.direction, other, self.order, (-10**9, 10**9), True)
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        if not (self.exact or other.exact):
            raise IncompatibleTruncation("product of two truncated series is only certified when one factor is exact")
        exact, trunc = (self, other) if self.exact else (other, self)
        a, b = exact.poly.degree_range(self.var) if exact.poly.terms else (0, 0)
        lo, hi = trunc.window[0] + b, trunc.window[1] + a
        poly = _clip(self.poly * other.poly, self.var, lo, hi)
        return Series(self.var, self.direction, poly, min(self.order, other.order), (lo, hi), self.exact and other.exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Series):
            lo = max(self.window[0], other.window[0])
            hi = min(self.window[1], other.window[1])
            a = _clip(self.poly, self.var, lo, hi)
            b = _clip(other.poly, self.var, lo, hi)
            return (a - b).is_zero()
        if isinstance(other, (int, LaurentPoly)):
            return (self.poly - _clip(other if isinstance(other, LaurentPoly) else LaurentPoly.constant(self.ring, other), self.var, *self.window)).is_zero()
        return NotImplemented

    __hash__ = None

    def __str__(self):
        d = "oo" if self.direction == INF else "0"
        lo, hi = self.window
        return f"{self.poly} + O({self.var}; window [{lo}, {hi}] at {d})"

    def __repr__(self):
        return f"Series({self})"


def _clip(p: LaurentPoly, var, lo, hi) -> LaurentPoly:
    if var not in p.vars:
        return p if lo <= 0 <= hi else LaurentPoly(p.ring, p.vars, {})
    i = p.ring.ngens + p.vars.index(var)
    return LaurentPoly(p.ring, p.vars, {k: c for k, c in p.terms.items() if lo <= k[i] <= hi})


def expand(f, var: str, dir, order: int | None = None) -> Series:
    """Expansion of ``f`` at ``var = oo`` or ``var = 0``, exponents ``|k| <= order``."""
    N = default_order() if order is None else order
    f = _as_ratfun(f)
    poly = region_expand(f, [(var, dir)], {var: (-N, N)})
    exact = not any(var in fac.variables(f.ring) for fac, _ in f.den)
    return Series(var, dir, poly, N, exact=exact)


# ---------------------------------------------------------------------------
# deltas and distributions


def _mono_text(ring, mono, sign=1):
    """``q*w/z`` style text for a name-based monomial."""
    pos = [(s, e) for s, e in mono if e > 0]
    neg = [(s, -e) for s, e in mono if e < 0]

    def prod(items):
        return "*".join(s if e == 1 else f"{s}^{e}" for s, e in items)

    top = prod(pos) or "1"
    if neg:
        bottom = prod(neg)
        if len(neg) > 1:
            bottom = f"({bottom})"
        text = f"{top}/{bottom}"
    else:
        text = top
    return ("-" if sign < 0 else "") + text


class Delta:
    """``delta(var/u)`` with ``u = sign * mono`` a unit monomial not containing ``var``."""

    __slots__ = ("var", "sign", "mono")

    def __init__(self, var, sign, mono):
        self.var = var
        self.sign = sign
        self.mono = tuple(mono)

    def value(self, ring, vars=None) -> LaurentPoly:
        vs = sort_vars(tuple(s for s, _ in self.mono if s not in ring.index) + tuple(vars or ()))
        return LaurentPoly.from_mono(ring, vs, self.mono, self.sign)

    def argument(self, ring) -> LaurentPoly:
        """The monomial ``var/u`` (unit coefficient)."""
        u = self.value(ring)
        return LaurentPoly.variable(ring, self.var, u.vars) * u.unit_inverse()

    def shift_vars(self, ring):
        return [(s, e) for s, e in self.mono if s not in ring.index]

    def text(self, ring) -> str:
        arg = self.argument(ring)
        (k, c), = arg.terms.items()
        mono = key_to_mono(ring, arg.vars, k)
        vs = [(s, e) for s, e in mono if s not in ring.index]
        if vs and vs[0][1] < 0:
            mono = tuple((s, -e) for s, e in mono)
        return f"delta({_mono_text(ring, mono, c)})"

    def _k(self):
        return (self.var, self.sign, self.mono)

    def __eq__(self, other):
        return isinstance(other, Delta) and self._k() == other._k()

    def __hash__(self):
        return hash(self._k())

    def __repr__(self):
        return f"Delta({self.var}, {self.sign}, {self.mono})"


def delta_from_argument(arg: LaurentPoly, avoid=()) -> Delta:
    """Build ``delta(arg)``; eliminates a variable occurring with exponent +-1.

    Variables in ``avoid`` are eliminated only when nothing else is possible.
    """
    ring = arg.ring
    arg = arg.trimmed()
    if len(arg.terms) != 1 and ring.relations:
        # unit monomials are kept unreduced; only fall back to the normal form
        arg = arg.normalized().trimmed()
    if len(arg.terms) != 1:
        raise KhallError(f"delta argument {arg} is not a monomial")
    (k, c), = arg.terms.items()
    if c not in (1, -1) or not ring.is_unit_key(k):
        raise KhallError(f"delta argument {arg} does not have a unit coefficient")
    n = ring.ngens
    vs = [(v, k[n + i]) for i, v in enumerate(arg.vars) if k[n + i]]
    if not vs:
        if not any(k) and c == 1:
            raise DeltaSquare("delta(1) arises: a delta would be squared")
        raise InconsistentSupport(f"delta of the constant {arg}: supports are inconsistent")
    cands = [(v, e) for v, e in vs if e in (1, -1)]
    if not cands:
        raise KhallError(f"delta argument {arg} has no variable with exponent +-1")
    preferred = [(v, e) for v, e in cands if v not in avoid] or cands
    v, e = preferred[0]
    if e == -1:
        k = tuple(-x for x in k)
    i = n + arg.vars.index(v)
    # arg = c * v * R  ->  delta(v / u) with u = (c R)^-1
    ukey = tuple(-x if j != i else 0 for j, x in enumerate(k))
    mono = key_to_mono(ring, arg.vars, ukey)
    return Delta(v, c, mono)


class DistTerm:
    """``prod(deltas) * tail``; ``window`` maps truncated tail variables to ranges."""

    __slots__ = ("deltas", "tail", "window", "_index")

    def __init__(self, deltas, tail: LaurentPoly, window=None):
        self.deltas = tuple(deltas)
        self.tail = tail
        self.window = dict(window or {})
        self._index = None

    @property
    def ring(self):
        return self.tail.ring

    def eliminated(self):
        return {d.var for d in self.deltas}

    def variables(self):
        ring = self.ring
        vs = set(self.tail.vars) | set(self.window) | self.eliminated()
        for d in self.deltas:
            vs.update(s for s, _ in d.shift_vars(ring))
        return vs

    def is_exact(self):
        return not self.window

    def index(self):
        if self._index is None:
            n = self.ring.ngens
            idx = {}
            for k, c in self.tail.terms.items():
                idx.setdefault(k[n:], {})[k[:n]] = c
            self._index = idx
        return self._index

    def coefficient(self, point: dict) -> dict:
        """Generator-exponent map of the coefficient at ``point`` (unreduced, read-only)."""
        ring = self.ring
        n = ring.ngens
        p = dict(point)
        gshift = [0] * n
        sign = 1
        avals = {d.var: p.pop(d.var, 0) for d in self.deltas}
        for d in self.deltas:
            a = avals[d.var]
            for s, e in d.mono:
                if s in ring.index:
                    gshift[ring.index[s]] -= a * e
                else:
                    p[s] = p.get(s, 0) + a * e
            if d.sign < 0 and a % 2:
                sign = -sign
        tv = self.tail.vars
        for v, e in p.items():
            if v not in tv and e:
                if v in self.window:
                    lo, hi = self.window[v]
                    if not lo <= e <= hi:
                        raise TruncationError(f"tail coefficient at {v}^{e} is outside the window [{lo}, {hi}]")
                return {}
        for v, (lo, hi) in self.window.items():
            e = p.get(v, 0)
            if not lo <= e <= hi:
                raise TruncationError(f"tail coefficient at {v}^{e} is outside the window [{lo}, {hi}]")
        key = tuple(p.get(v, 0) for v in tv)
        hit = self.index().get(key)
        if not hit:
            return {}
        if sign == 1 and not any(gshift):
            return hit
        return {tuple(map(add, g, gshift)): c * sign for g, c in hit.items()}

    def needed_window(self, box: dict) -> dict:
        """Tail exponent ranges touched when reading coefficients on ``box``."""
        ring = self.ring
        iv = {v: tuple(r) for v, r in box.items()}
        for d in self.deltas:
            alo, ahi = iv.pop(d.var, (0, 0))
            for s, e in d.mono:
                if s in ring.index:
                    continue
                lo, hi = iv.get(s, (0, 0))
                c1, c2 = alo * e, ahi * e
                iv[s] = (lo + min(c1, c2), hi + max(c1, c2))
        return iv


def _scalar_poly(ring, c):
    if isinstance(c, int):
        return LaurentPoly.constant(ring, c)
    if c.vars and any(any(k[ring.ngens:]) for k in c.terms):
        raise TypeError("scalar must not involve formal variables")
    return c.with_vars(()) if c.vars else c


class FormalDist:
    """Finite sum of :class:`DistTerm` s over a common ring.

    ``box`` is the exponent window on which the value is reported and
    compared; it does not restrict exact terms.
    """

    def __init__(self, ring, terms=(), box=None):
        self.ring = ring
        self.terms = [t for t in terms if t.tail.terms]
        self.box = dict(box or {})

    @classmethod
    def zero(cls, ring, box=None):
        return cls(ring, (), box)

    @classmethod
    def from_poly(cls, p, window=None, box=None):
        if isinstance(p, RatFun):
            p = p.as_polynomial()
        return cls(p.ring, [DistTerm((), p, window)], box if box is not None else dict(window or {}))

    @property
    def vars(self):
        vs = set(self.box)
        for t in self.terms:
            vs |= t.variables()
        return sort_vars(vs)

    # -- algebra ------------------------------------------------------------
    def _merge_box(self, other):
        box = dict(self.box)
        for v, (lo, hi) in other.box.items():
            if v in box:
                a, b = box[v]
                box[v] = (max(a, lo), min(b, hi))
            else:
                box[v] = (lo, hi)
        return box

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, FormalDist):
            return NotImplemented
        if other.ring != self.ring:
            raise TypeError("distributions over different rings")
        return FormalDist(self.ring, self.terms + other.terms, self._merge_box(other))

    __radd__ = __add__

    def __neg__(self):
        return FormalDist(self.ring, [DistTerm(t.deltas, -t.tail, t.window) for t in self.terms], self.box)

    def __sub__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, FormalDist):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "FormalDist":
        """Multiply by a ring element (no formal variables)."""
        c = _scalar_poly(self.ring, c)
        out = []
        for t in self.terms:
            tail = t.tail * c.with_vars(t.tail.vars)
            out.append(DistTerm(t.deltas, tail, t.window))
        return FormalDist(self.ring, out, self.box)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return dist_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return dist_mul(self, other)

    def with_box(self, box):
        return FormalDist(self.ring, self.terms, box)

    # -- coefficients -------------------------------------------------------
    def _full_box(self, box=None):
        box = dict(self.box if box is None else box)
        for v in self.vars:
            if v in box:
                continue
            lo = hi = 0
            for t in self.terms:
                if v in t.window:
                    raise TruncationError(f"no reporting window for truncated variable {v}")
                if v in t.eliminated() or any(v == s for d in t.deltas for s, _ in d.mono):
                    n = default_order()
                    lo, hi = min(lo, -n), max(hi, n)
                elif v in t.tail.vars:
                    a, b = t.tail.degree_range(v)
                    lo, hi = min(lo, a), max(hi, b)
            box[v] = (lo, hi)
        return box

    def coefficient(self, point: dict, reduce: bool = True) -> LaurentPoly:
        """Ring element at the exponent ``point``.

        With ``reduce=False`` the raw representative in the free cover is
        returned, before relations and the diagonal identification are applied.
        """
        acc = {}
        for t in self.terms:
            for k, c in t.coefficient(point).items():
                v = acc.get(k, 0) + c
                if v:
                    acc[k] = v
                else:
                    acc.pop(k, None)
        out = LaurentPoly(self.ring, (), acc)
        return out.normalized() if reduce else out

    def coefficient_map(self, box=None) -> dict:
        """``{exponent tuple (in self.vars order): ring element}`` of non-zero coefficients on the box."""
        box = self._full_box(box)
        vs = sort_vars(box)
        out = {}
        ranges = [range(box[v][0], box[v][1] + 1) for v in vs]
        for pt in itertools.product(*ranges):
            c = self.coefficient(dict(zip(vs, pt)))
            if c.terms:
                out[pt] = c
        return out

    def equals(self, other, box=None) -> bool:
        if isinstance(other, int) and other == 0:
            other = FormalDist.zero(self.ring)
        if box is None:
            box = self._merge_box(other)
        box = self._full_box(box)
        box = other._full_box(box)
        return not (self - other).coefficient_map(box)

    def __eq__(self, other):
        if isinstance(other, FormalDist) or (isinstance(other, int) and other == 0):
            return self.equals(other)
        return NotImplemented

    __hash__ = None

    def is_zero(self, box=None) -> bool:
        return not self.coefficient_map(box)

    def delta_parts(self) -> dict:
        """Group terms by their delta factors (text key)."""
        parts = {}
        for t in self.terms:
            key = " ".join(sorted(d.text(self.ring) for d in t.deltas))
            parts.setdefault(key, []).append(t)
        return {k: FormalDist(self.ring, v, self.box) for k, v in parts.items()}

    # -- output ---------------------------------------------------------------
    def to_json(self, box=None) -> dict:
        box = self._full_box(box)
        vs = sort_vars(box)
        return {
            "vars": list(vs),
            "window": {v: list(box[v]) for v in vs},
            "coefficients": {",".join(map(str, k)): str(c) for k, c in sorted(self.coefficient_map(box).items())},
        }

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        ring = self.ring
        for t in sorted(self.terms, key=lambda t: (sorted(d.text(ring) for d in t.deltas), str(t.tail))):
            ds = "*".join(sorted(d.text(ring) for d in t.deltas))
            tail = format_terms(ring, t.tail.vars, t.tail.normalized().terms)
            if t.window:
                w = ", ".join(f"{v} in [{lo}, {hi}]" for v, (lo, hi) in sorted(t.window.items()))
                tail = f"({tail}) [{w}]"
            elif ds and len(t.tail.terms) > 1:
                tail = f"({tail})"
            if ds and tail == "1":
                parts.append(ds)
            elif ds and tail == "-1":
                parts.append("-" + ds)
            elif ds:
                parts.append(f"{ds}*({tail})" if tail.startswith("-") else f"{ds}*{tail}")
            else:
                parts.append(tail)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"FormalDist({self})"


def delta(arg, ring=None, box=None) -> FormalDist:
    """The distribution ``delta(arg)`` for a unit monomial ``arg``."""
    if isinstance(arg, str):
        from .parser import parse_in_ring

        arg = parse_in_ring(arg, ring)
    d = delta_from_argument(arg)
    tail = LaurentPoly.constant(arg.ring, 1)
    return FormalDist(arg.ring, [DistTerm((d,), tail)], box)


def _substitute_all(p: LaurentPoly, elim, ring):
    for v, u in elim:
        if v in p.vars:
            p = p.substitute(v, u)
    return p


def _term_product(t1: DistTerm, t2: DistTerm) -> DistTerm:
    ring = t1.ring
    if t1.window and t2.window:
        raise IllDefinedProduct("product of two truncated tails is not defined")
    avoid = set(t1.window) | set(t2.window)
    elim = [(d.var, d.value(ring)) for d in t1.deltas]
    for d in t2.deltas:
        a = _substitute_all(d.argument(ring), elim, ring)
        nd = delta_from_argument(a, avoid)
        u = nd.value(ring)
        elim = [(v, uu.substitute(nd.var, u)) for v, uu in elim] + [(nd.var, u)]
    vars = sort_vars(t1.tail.vars + t2.tail.vars)
    tail = t1.tail.with_vars(vars) * t2.tail.with_vars(vars)
    window = dict(t1.window or t2.window)
    exact_poly = t2.tail if t1.window else t1.tail
    for v, (lo, hi) in list(window.items()):
        a, b = exact_poly.degree_range(v) if exact_poly.terms else (0, 0)
        window[v] = (lo + b, hi + a)
    for v, u in elim:
        if v in window:
            raise IllDefinedProduct(f"delta support would substitute into the truncated variable {v}")
        tail = tail.substitute(v, u)
    deltas = []
    for v, u in elim:
        (k, c), = u.terms.items()
        deltas.append(Delta(v, c, key_to_mono(ring, u.vars, k)))
    return DistTerm(deltas, tail.trimmed(), window)


def dist_mul(d: FormalDist, g, at=None) -> FormalDist:
    """``d * g`` with delta-support substitution applied to ``g`` first.

    ``g`` may be an integer, ring element, Laurent polynomial, rational
    function or distribution.  A rational ``g`` that is still rational after
    substitution must be expanded: pass ``at="inf"``/``"zero"`` (or a mapping
    variable -> direction).  Coefficients are then certified on ``d.box``.
    """
    ring = d.ring
    if isinstance(g, FormalDist):
        out = [_term_product(a, b) for a in d.terms for b in g.terms]
        return FormalDist(ring, out, d._merge_box(g))
    if isinstance(g, int):
        return d.scale(g)
    g = _as_ratfun(g, ring)
    out = []
    for t in d.terms:
        elim = [(dl.var, dl.value(ring)) for dl in t.deltas]
        gs = g
        for v, u in elim:
            if v in gs.vars:
                gs = substitute(gs, v, u)
        try:
            gp = gs.as_polynomial()
        except NotPolynomial:
            gp = None
        if gp is not None:
            vars = sort_vars(t.tail.vars + gp.vars)
            tail = t.tail.with_vars(vars) * gp.with_vars(vars)
            window = {}
            for v, (lo, hi) in t.window.items():
                a, b = gp.degree_range(v) if gp.terms else (0, 0)
                window[v] = (lo + b, hi + a)
            out.append(DistTerm(t.deltas, tail.trimmed(), window))
            continue
        if at is None:
            raise IllDefinedProduct("multiplying by a rational function needs an expansion direction (at=)")
        if t.window:
            raise IllDefinedProduct("cannot multiply a truncated tail by a rational function")
        gs = gs.simplified()
        dvars = set()
        for fac, _ in gs.den:
            dvars.update(fac.variables(ring))
        region_vars = sort_vars(dvars)
        dirs = at if isinstance(at, dict) else {v: at for v in region_vars}
        box = d._full_box()
        need = t.needed_window(box)
        gbox = {}
        for v in region_vars:
            lo, hi = need.get(v, (0, 0))
            a, b = t.tail.degree_range(v) if t.tail.terms else (0, 0)
            gbox[v] = (lo - b, hi - a)
        gexp = region_expand(gs, [(v, dirs[v]) for v in region_vars], gbox)
        vars = sort_vars(t.tail.vars + gexp.vars)
        tail = t.tail.with_vars(vars) * gexp.with_vars(vars)
        window = {v: need.get(v, (0, 0)) for v in region_vars}
        tail = LaurentPoly(ring, vars, {
            k: c for k, c in tail.terms.items()
            if all(window[v][0] <= k[ring.ngens + vars.index(v)] <= window[v][1] for v in region_vars)
        })
        out.append(DistTerm(t.deltas, tail, window))
    return FormalDist(ring, out, d.box)


# ---------------------------------------------------------------------------
# two-sided expansions


def _delta_candidates(f: RatFun, var: str):
    """Values ``u`` with a pole of ``f`` at ``var = u`` of the form ``1 - c*var^{+-1}*R``."""
    ring = f.ring
    out = []
    for fac, _ in f.den:
        if not isinstance(fac, Binomial):
            continue
        e = dict(fac.mono).get(var, 0)
        if e not in (1, -1):
            continue
        # 1 - s*var^e*R = 0  <=>  var = (s R)^(-e)
        rest = tuple((s, -x * e) for s, x in fac.mono if s != var)
        vs = sort_vars(s for s, _ in rest if s not in ring.index)
        u = LaurentPoly.from_mono(ring, vs, rest, fac.sign)
        if u not in out:
            out.append(u)
    return out


def _recognize(E: LaurentPoly, var, window, candidates):
    """Return ``(Delta, C)`` when ``E = C * delta(var/u)`` on the window, else None."""
    ring = E.ring
    cmap = E.coefficient_map(var)
    rest = tuple(v for v in E.vars if v != var)
    zero = LaurentPoly(ring, rest, {})
    lo, hi = window
    C = cmap.get(0, zero)
    if C.is_zero():
        return None
    for u in candidates:
        if var in u.vars:
            continue
        vs = sort_vars(rest + u.vars)
        Cv = C.with_vars(vs)
        uinv = u.unit_inverse()
        if uinv is None:
            continue
        ok = True
        for k in range(lo, hi + 1):
            expected = Cv * (uinv.with_vars(vs) ** k if k >= 0 else u.with_vars(vs) ** (-k))
            got = cmap.get(k, zero).with_vars(sort_vars(vs + cmap.get(k, zero).vars))
            if not (got - expected).is_zero():
                ok = False
                break
        if ok:
            (uk, uc), = u.terms.items()
            return Delta(var, uc, key_to_mono(ring, u.vars, uk)), C
    return None


def two_sided(f, var: str, order: int | None = None, window=None, canonicalize: bool = True) -> FormalDist:
    """``f|_{var=oo} - f|_{var=0}`` on the window ``[-order, order]``.

    When the result is ``C * delta(var/u)`` on the whole window for a pole
    ``u`` of ``f``, it is returned in that (exact) delta form.
    """
    f = _as_ratfun(f)
    N = default_order() if order is None else order
    window = tuple(window) if window is not None else (-N, N)
    box = {var: window}
    E = region_expand(f, [(var, INF)], box) - region_expand(f, [(var, ZERO)], box)
    if E.is_zero():
        return FormalDist.zero(f.ring, {var: window})
    if canonicalize:
        hit = _recognize(E, var, window, _delta_candidates(f.simplified(), var))
        if hit is not None:
            dl, C = hit
            return FormalDist(f.ring, [DistTerm((dl,), C.trimmed())], {var: window})
    return FormalDist(f.ring, [DistTerm((), E.trimmed(), {var: window})], {var: window})


def canonicalize(dist: FormalDist, var: str, candidates) -> FormalDist:
    """Rewrite a single truncated series term in ``var`` as ``C * delta(var/u)`` if it matches."""
    if len(dist.terms) != 1 or dist.terms[0].deltas:
        return dist
    t = dist.terms[0]
    if set(t.window) != {var}:
        return dist
    hit = _recognize(t.tail, var, t.window[var], list(candidates))
    if hit is None:
        return dist
    dl, C = hit
    return FormalDist(dist.ring, [DistTerm((dl,), C.trimmed())], dist.box)


_SIGN = {INF: 1, ZERO: -1}


def ordered_double_expand(f, first: str, second: str, order: int | None = None, window=None) -> FormalDist:
    """Apply ``|_{first = oo - 0}`` and then ``|_{second = oo - 0}``.

    Computed directly as the signed sum of the four region expansions in which
    ``first`` dominates.  Exact on the box ``[-order, order]^2``.
    """
    f = _as_ratfun(f)
    N = default_order() if order is None else order
    w = tuple(window) if window is not None else (-N, N)
    box = {first: w, second: w}
    total = None
    for a in (INF, ZERO):
        for b in (INF, ZERO):
            part = region_expand(f, [(first, a), (second, b)], box)
            part = part * (_SIGN[a] * _SIGN[b])
            total = part if total is None else total + part
    total = total.trimmed()
    return FormalDist(f.ring, [DistTerm((), total, dict(box))], dict(box))


def delta_bracket(f, g, alpha, order: int | None = None, x: str = "x", y: str = "y") -> FormalDist:
    """``delta(y/(alpha x)) {f(x) g(y)|_{(x,y) = oo - 0}}``.

    Under the delta the bracket becomes the two-sided expansion of
    ``f(x) g(alpha x)`` in ``x``; it is taken on ``[-2N, 2N]`` so that the
    result is certified on the box ``[-N, N]^2``.
    """
    f = _as_ratfun(f)
    ring = f.ring
    g = _as_ratfun(g, ring)
    if isinstance(alpha, int):
        alpha = LaurentPoly.constant(ring, alpha)
    if set(f.vars) - {x} or set(g.vars) - {y}:
        raise ValueError(f"expected f in {x} and g in {y}")
    inv = alpha.unit_inverse()
    if inv is None:
        raise KhallError(f"alpha = {alpha} is not a unit monomial")
    N = default_order() if order is None else order
    xv = LaurentPoly.variable(ring, x)
    h = f * substitute(g, y, alpha * xv)
    T = two_sided(h, x, window=(-2 * N, 2 * N))
    arg = LaurentPoly.variable(ring, y, (x,)) * (inv * xv.unit_inverse())
    dl = delta_from_argument(arg, avoid=(x,))
    box = {x: (-N, N), y: (-N, N)}
    D = FormalDist(ring, [DistTerm((dl,), LaurentPoly.constant(ring, 1))], box)
    return dist_mul(D, T).with_box(box)


def exchange_defect(f, g, alpha, order: int | None = None, x: str = "x", y: str = "y") -> FormalDist:
    """``-(1/alpha) delta(y/(alpha x)) {f(x) g(y)|_{(x,y) = oo - 0}}``.

    This is the difference between expanding ``f(x) g(y) / (y/x - alpha)``
    first in ``x`` and first in ``y``.
    """
    f = _as_ratfun(f)
    if isinstance(alpha, int):
        alpha = LaurentPoly.constant(f.ring, alpha)
    inv = alpha.unit_inverse()
    if inv is None:
        raise KhallError(f"alpha = {alpha} is not a unit monomial")
    return delta_bracket(f, g, alpha, order, x, y).scale(-inv)


def ordered_difference(f, x: str, y: str, order: int | None = None, window=None) -> FormalDist:
    """``ordered_double_expand(f, x, y) - ordered_double_expand(f, y, x)``.

    In the two mixed regions (one variable at infinity, the other at zero)
    the dominant variable is the same whichever is expanded first, so those
    expansions agree and cancel.  Only the two like regions are computed.
    """
    f = _as_ratfun(f)
    N = default_order() if order is None else order
    w = tuple(window) if window is not None else (-N, N)
    box = {x: w, y: w}
    total = None
    for d in (INF, ZERO):
        part = region_expand(f, [(x, d), (y, d)], box) - region_expand(f, [(y, d), (x, d)], box)
        total = part if total is None else total + part
    total = total.trimmed()
    return FormalDist(f.ring, [DistTerm((), total, dict(box))], dict(box))
