"""Split virtual K-classes and their exterior/symmetric power series.

A :class:`KClass` is ``sum [u] - sum [v]`` where every ``u``, ``v`` is a
*line element*: a monomial in invertible ring generators.  By the splitting
principle everything we need (rank, determinant, dual, lambda series) is
computed from these Chern roots.
"""

from __future__ import annotations

import json
from collections import Counter
from importlib import resources
from operator import add

from .distcalc import default_order, two_sided
from .errors import KhallError, RankNotZero, UnknownMonomial
from .laurent import LaurentPoly, RatFun, format_mono
from .ring import Ring, preset


def _line_key(ring: Ring, u) -> tuple:
    """Generator-exponent key of a line element given as key, dict, name or unit monomial."""
    if isinstance(u, tuple):
        key = u
    elif isinstance(u, int):
        if u != 1:
            raise KhallError("the only integer line element is 1")
        key = (0,) * ring.ngens
    elif isinstance(u, str):
        from .parser import parse_in_ring

        return _line_key(ring, parse_in_ring(u, ring))
    elif isinstance(u, dict):
        key = [0] * ring.ngens
        for g, e in u.items():
            key[ring.index[g]] += e
        key = tuple(key)
    elif isinstance(u, LaurentPoly):
        t = u.trimmed()
        if t.vars or len(t.terms) != 1:
            raise KhallError(f"{u} is not a line element")
        (key, c), = t.terms.items()
        if c != 1:
            raise KhallError(f"line element {u} must have coefficient 1")
    else:
        raise TypeError(f"cannot read a line element from {type(u).__name__}")
    if len(key) != ring.ngens or not ring.is_unit_key(key):
        raise KhallError(f"line element {key} is not a unit monomial")
    return tuple(key)


class KClass:
    """Signed multiset of line elements; equal elements on both sides cancel."""

    __slots__ = ("ring", "plus", "minus")

    def __init__(self, ring: Ring, plus=(), minus=()):
        self.ring = ring
        p = Counter(_line_key(ring, u) for u in plus)
        m = Counter(_line_key(ring, u) for u in minus)
        common = p & m
        self.plus = p - common
        self.minus = m - common

    @classmethod
    def zero(cls, ring):
        return cls(ring)

    @classmethod
    def one(cls, ring):
        return cls(ring, [1])

    def _from_counters(self, plus, minus):
        out = KClass(self.ring)
        common = plus & minus
        out.plus = plus - common
        out.minus = minus - common
        return out

    @property
    def rank(self) -> int:
        return sum(self.plus.values()) - sum(self.minus.values())

    def det(self) -> LaurentPoly:
        key = [0] * self.ring.ngens
        for k, m in self.plus.items():
            key = [a + m * b for a, b in zip(key, k)]
        for k, m in self.minus.items():
            key = [a - m * b for a, b in zip(key, k)]
        return LaurentPoly(self.ring, (), {tuple(key): 1})

    def dual(self) -> "KClass":
        inv = lambda c: Counter({tuple(-e for e in k): m for k, m in c.items()})
        return self._from_counters(inv(self.plus), inv(self.minus))

    def element(self) -> LaurentPoly:
        """The class as a ring element ``sum u - sum v``."""
        terms = Counter()
        for k, m in self.plus.items():
            terms[k] += m
        for k, m in self.minus.items():
            terms[k] -= m
        return LaurentPoly(self.ring, (), dict(terms))

    def elements(self):
        """Signed list ``[(+1 | -1, key), ...]`` with multiplicity."""
        out = []
        for k in sorted(self.plus, reverse=True):
            out += [(1, k)] * self.plus[k]
        for k in sorted(self.minus, reverse=True):
            out += [(-1, k)] * self.minus[k]
        return out

    def embed(self, ring: Ring) -> "KClass":
        def move(c):
            out = Counter()
            for k, m in c.items():
                key = [0] * ring.ngens
                for g, e in zip(self.ring.gens, k):
                    key[ring.index[g]] = e
                out[tuple(key)] += m
            return out

        res = KClass(ring)
        res.plus, res.minus = move(self.plus), move(self.minus)
        return res

    def rename(self, mapping: dict, ring: Ring | None = None) -> "KClass":
        """Rename generators (e.g. tag Chern roots ``f_i -> f1_i``)."""
        ring = ring or self.ring

        def move(c):
            out = Counter()
            for k, m in c.items():
                key = [0] * ring.ngens
                for g, e in zip(self.ring.gens, k):
                    if e:
                        key[ring.index[mapping.get(g, g)]] += e
                out[tuple(key)] += m
            return out

        res = KClass(ring)
        res.plus, res.minus = move(self.plus), move(self.minus)
        return res

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, KClass):
            return NotImplemented
        return self._from_counters(self.plus + other.plus, self.minus + other.minus)

    __radd__ = __add__

    def __neg__(self):
        return self._from_counters(Counter(self.minus), Counter(self.plus))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other < 0:
                return (-self) * (-other)
            out = KClass(self.ring)
            for _ in range(other):
                out = out + self
            return out
        if not isinstance(other, KClass):
            other = KClass(self.ring, [other])
        plus, minus = Counter(), Counter()
        for a, ma in self.plus.items():
            for b, mb in other.plus.items():
                plus[tuple(map(add, a, b))] += ma * mb
            for b, mb in other.minus.items():
                minus[tuple(map(add, a, b))] += ma * mb
        for a, ma in self.minus.items():
            for b, mb in other.plus.items():
                minus[tuple(map(add, a, b))] += ma * mb
            for b, mb in other.minus.items():
                plus[tuple(map(add, a, b))] += ma * mb
        return self._from_counters(plus, minus)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.plus and not self.minus
        if not isinstance(other, KClass):
            return NotImplemented
        return self.ring == other.ring and self.plus == other.plus and self.minus == other.minus

    def __hash__(self):
        return hash((frozenset(self.plus.items()), frozenset(self.minus.items())))

    def __str__(self):
        items = []
        for sign, k in self.elements():
            mono = format_mono(self.ring, (), k) or "1"
            items.append(("+" if sign > 0 else "-") + mono)
        return "K[" + ",".join(items) + "]"

    def __repr__(self):
        return f"KClass({self})"


def _arg_poly(ring, var, scale, power):
    if isinstance(scale, int):
        scale = LaurentPoly.constant(ring, scale)
    if var is None:
        return scale
    return scale * LaurentPoly.variable(ring, var) ** power


def wedge_series(K: KClass, var: str | None = None, scale=1, power: int = 1) -> RatFun:
    """``prod_plus (1 - u*a) / prod_minus (1 - u*a)`` with ``a = scale * var^power``."""
    ring = K.ring
    a = _arg_poly(ring, var, scale, power)
    one = LaurentPoly.constant(ring, 1)
    num = one
    for k, m in K.plus.items():
        for _ in range(m):
            num = num * (one - a * LaurentPoly(ring, (), {k: 1}))
    out = RatFun(num)
    for k, m in K.minus.items():
        b = RatFun(one - a * LaurentPoly(ring, (), {k: 1}))
        out = out * (b.inverse() ** m)
    return out


def sym_series(K: KClass, var: str | None = None, scale=1, power: int = 1) -> RatFun:
    """``Sym(K a) = 1 / wedge(K a)``."""
    return wedge_series(-K, var, scale, power)


def dualize(K: KClass) -> KClass:
    return K.dual()


def det_rank(K: KClass):
    return K.det(), K.rank


def twisted_expansion(K: KClass, L, order: int | None = None, var: str = "x"):
    """``wedge((L - 1) K x)|_{x = oo - 0}`` for a rank-zero ``K``."""
    if K.rank != 0:
        raise RankNotZero(f"class {K} has rank {K.rank}, expected 0")
    ring = K.ring
    line = KClass(ring, [L])
    twisted = line * K - K
    N = default_order() if order is None else order
    return two_sided(wedge_series(twisted, var), var, N, canonicalize=False)


def calculation_lemma_check(K: KClass, L, order: int | None = None, var: str = "x") -> dict:
    """Compare the x^-1 and x^1 coefficients of :func:`twisted_expansion` with the closed forms."""
    ring = K.ring
    dist = twisted_expansion(K, L, order, var)
    Lp = LaurentPoly(ring, (), {_line_key(ring, L): 1})
    Linv = Lp.unit_inverse()
    expected_minus = (1 - Linv) * K.dual().element()
    expected_plus = (Lp - 1) * K.element()
    got_minus = dist.coefficient({var: -1})
    got_plus = dist.coefficient({var: 1})
    return {
        "coefficient_minus": got_minus,
        "coefficient_plus": got_plus,
        "expected_minus": expected_minus,
        "expected_plus": expected_plus,
        "pass": got_minus == expected_minus and got_plus == expected_plus,
    }


# ---------------------------------------------------------------------------
# Euler characteristic functionals


class ChiTable:
    """Linear functional on a ring, given on the normal-form monomial basis."""

    def __init__(self, name: str, ring: Ring, values: dict, derivation: str = ""):
        self.name = name
        self.ring = ring
        self.derivation = derivation
        self.values = {}
        for mono, v in values.items():
            key = _line_key(ring, mono) if not isinstance(mono, tuple) else mono
            self.values[key] = int(v)

    @classmethod
    def from_json(cls, name, data):
        ring = preset(data.get("ring", name)) if isinstance(data.get("ring", name), str) else data["ring"]
        return cls(name, ring, data["values"], data.get("derivation", ""))

    def __call__(self, e) -> int:
        return chi(self, e)

    def __repr__(self):
        return f"ChiTable({self.name})"


def load_chi_tables(path=None) -> dict:
    if path is None:
        text = resources.files("khall").joinpath("data/chi_tables.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text)
    return {name: ChiTable.from_json(name, entry) for name, entry in data.items()}


_TABLES = None


def chi_table(name: str) -> ChiTable:
    global _TABLES
    if _TABLES is None:
        _TABLES = load_chi_tables()
    for key, table in _TABLES.items():
        if key.lower() == name.lower():
            return table
    raise UnknownMonomial(f"no Euler characteristic table named {name!r}")


def chi(table: ChiTable, e) -> int:
    """Linear extension of ``table`` to the normal form of ``e``."""
    ring = table.ring
    if isinstance(e, int):
        e = LaurentPoly.constant(ring, e)
    if e.ring != ring:
        e = ring.normalize(e)
    e = e.normalized()
    total = 0
    for k, c in e.terms.items():
        if any(k[ring.ngens:]):
            raise UnknownMonomial("formal variables have no Euler characteristic")
        gk = k[: ring.ngens]
        if gk not in table.values:
            raise UnknownMonomial(f"monomial {format_mono(ring, (), gk) or '1'} is not in the {table.name} table")
        total += c * table.values[gk]
    return total
