"""Laurent polynomials and rational functions over a presented base ring.

Internally a :class:`LaurentPoly` is a flat sparse map from exponent tuples to
integers.  A key lists the generator exponents of the ring first and then the
exponents of the formal variables (kept sorted, ``z2`` before ``z10``).
Reduction modulo the ring relations is lazy: arithmetic works in the free
cover and :meth:`LaurentPoly.normalized` produces the unique normal form.
This keeps exact division (e.g. by ``q - 1``) meaningful even in rings where
``q - 1`` is nilpotent.

A :class:`RatFun` keeps its denominator factored into binomials
``1 - c*m`` (``c`` a signed unit monomial) plus, rarely, general factors.  The
factored form is what the expansion code needs.
"""

from __future__ import annotations

import heapq
import itertools
from collections import Counter
from math import gcd
from operator import add, sub

from .errors import DenominatorVanishes, DivisionByZero, ExponentOverflow, NotPolynomial, UnknownGenerator
from .ring import EXPONENT_LIMIT, Ring, is_formal_variable, var_key


def sort_vars(names):
    return tuple(sorted(set(names), key=var_key))


def _rekey_map(old_vars, new_vars, ngens):
    pos = [ngens + new_vars.index(v) for v in old_vars]
    width = ngens + len(new_vars)

    def rekey(key):
        out = list(key[:ngens]) + [0] * len(new_vars)
        for p, e in zip(pos, key[ngens:]):
            out[p] = e
        return tuple(out)

    if tuple(old_vars) == tuple(new_vars):
        return None, width
    return rekey, width


def _check_bounds(terms):
    for k in terms:
        if k and (max(k) > EXPONENT_LIMIT or min(k) < -EXPONENT_LIMIT):
            raise ExponentOverflow("exponent exceeds 2^31")


def _add_into(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _mul_terms(a, b):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(map(add, ka, kb))
            v = out.get(k, 0) + ca * cb
            if v:
                out[k] = v
            else:
                del out[k]
    return out


def exact_divide_terms(p: dict, d: dict):
    """Exact quotient ``p / d`` of flat Laurent maps over Z, or None.

    Both are shifted into the positive orthant (``d`` made monomial-free) and
    divided greedily in lex order, which terminates there.
    """
    if not d:
        raise DivisionByZero("division by zero polynomial")
    if not p:
        return {}
    n = len(next(iter(d)))
    dmin = tuple(min(k[i] for k in d) for i in range(n))
    pmin = tuple(min(k[i] for k in p) for i in range(n))
    d0 = {tuple(map(sub, k, dmin)): c for k, c in d.items()}
    rem = {tuple(map(sub, k, pmin)): c for k, c in p.items()}
    lead = max(d0)
    lc = d0[lead]
    heap = [tuple(-e for e in k) for k in rem]
    heapq.heapify(heap)
    quot = {}
    while rem:
        while True:
            neg = heapq.heappop(heap)
            top = tuple(-e for e in neg)
            if top in rem:
                break
        t = tuple(map(sub, top, lead))
        if any(e < 0 for e in t):
            return None
        c = rem[top]
        if c % lc:
            return None
        qc = c // lc
        quot[t] = qc
        for k, dc in d0.items():
            kk = tuple(map(add, t, k))
            v = rem.get(kk, 0) - qc * dc
            if v:
                if kk not in rem:
                    heapq.heappush(heap, tuple(-e for e in kk))
                rem[kk] = v
            else:
                rem.pop(kk, None)
    shift = tuple(map(sub, pmin, dmin))
    return {tuple(map(add, k, shift)): c for k, c in quot.items()}


class LaurentPoly:
    """Sparse Laurent polynomial over ``ring`` in the formal variables ``vars``."""

    __slots__ = ("ring", "vars", "terms", "_reduced")

    def __init__(self, ring: Ring, vars=(), terms=None, reduced=False):
        self.ring = ring
        self.vars = tuple(vars)
        self.terms = {k: c for k, c in (terms or {}).items() if c}
        self._reduced = reduced

    @classmethod
    def _wrap(cls, ring, vars, terms, reduced=False):
        """Adopt ``terms`` without copying; the caller guarantees no zero coefficients."""
        out = cls.__new__(cls)
        out.ring = ring
        out.vars = tuple(vars)
        out.terms = terms
        out._reduced = reduced
        return out

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, ring, c=1, vars=()):
        vars = tuple(vars)
        key = (0,) * (ring.ngens + len(vars))
        return cls(ring, vars, {key: c} if c else {}, reduced=not ring.relations)

    @classmethod
    def variable(cls, ring, name, vars=None):
        if not is_formal_variable(name):
            raise UnknownGenerator(f"{name!r} is not a formal variable")
        vars = sort_vars((vars or ()) + (name,))
        key = [0] * (ring.ngens + len(vars))
        key[ring.ngens + vars.index(name)] = 1
        return cls(ring, vars, {tuple(key): 1})

    @classmethod
    def monomial(cls, ring, exps: dict, coeff=1):
        """``coeff * prod s^e`` where symbols may be generators or formal variables."""
        vars = sort_vars(s for s in exps if s not in ring.index)
        for s in vars:
            if not is_formal_variable(s):
                raise UnknownGenerator(f"unknown symbol {s!r}")
        key = [0] * (ring.ngens + len(vars))
        for s, e in exps.items():
            if s in ring.index:
                key[ring.index[s]] += e
            else:
                key[ring.ngens + vars.index(s)] += e
        _check_bounds([key])
        return cls(ring, vars, {tuple(key): coeff})

    @classmethod
    def from_mono(cls, ring, vars, mono, coeff=1):
        return cls(ring, vars, {mono_to_key(ring, vars, mono): coeff})

    # -- structure -----------------------------------------------------
    def with_vars(self, vars) -> "LaurentPoly":
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = [v for v in self.vars if v not in vars]
        if missing:
            keep = [i for i, v in enumerate(self.vars) if v in missing]
            n = self.ring.ngens
            for k in self.terms:
                if any(k[n + i] for i in keep):
                    raise ValueError(f"cannot drop variables {missing} still in use")
            sub = sort_vars(v for v in self.vars if v in vars)
            idx = [i for i, v in enumerate(self.vars) if v in vars]
            terms = {k[:n] + tuple(k[n + i] for i in idx): c for k, c in self.terms.items()}
            return LaurentPoly(self.ring, sub, terms, self._reduced).with_vars(vars)
        rekey, _ = _rekey_map(self.vars, vars, self.ring.ngens)
        return LaurentPoly._wrap(self.ring, vars, {rekey(k): c for k, c in self.terms.items()}, self._reduced)

    def trimmed(self) -> "LaurentPoly":
        n = self.ring.ngens
        used = [v for i, v in enumerate(self.vars) if any(k[n + i] for k in self.terms)]
        return self.with_vars(tuple(used))

    def embed(self, ring: Ring) -> "LaurentPoly":
        """Re-express over ``ring``, whose generators include ours."""
        if ring == self.ring:
            return self
        pos = []
        for g in self.ring.gens:
            if g not in ring.index:
                raise UnknownGenerator(f"generator {g!r} missing from target ring")
            pos.append(ring.index[g])
        n = self.ring.ngens
        out = {}
        for k, c in self.terms.items():
            g = [0] * ring.ngens
            for p, e in zip(pos, k[:n]):
                g[p] = e
            out[tuple(g) + k[n:]] = c
        return LaurentPoly(ring, self.vars, out)

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                raise TypeError("cannot combine polynomials over different rings")
            if other.vars == self.vars:
                return self, other
            vars = sort_vars(self.vars + other.vars)
            return self.with_vars(vars), other.with_vars(vars)
        if isinstance(other, int):
            return self, LaurentPoly.constant(self.ring, other, self.vars)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        co = self._coerce(other)
        if co is NotImplemented:
            return NotImplemented
        a, b = co
        out = dict(a.terms)
        for k, c in b.terms.items():
            _add_into(out, k, c)
        return LaurentPoly._wrap(a.ring, a.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._wrap(self.ring, self.vars, {k: -c for k, c in self.terms.items()}, self._reduced)

    def __sub__(self, other):
        co = self._coerce(other)
        if co is NotImplemented:
            return NotImplemented
        a, b = co
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly(self.ring, self.vars, {})
            return LaurentPoly(self.ring, self.vars, {k: c * other for k, c in self.terms.items()})
        co = self._coerce(other)
        if co is NotImplemented:
            return NotImplemented
        a, b = co
        out = _mul_terms(a.terms, b.terms)
        m = a.ring.marker
        if m is not None:
            for k in out:
                if k[m] > 1:
                    from .errors import DiagonalSquare

                    raise DiagonalSquare("product of two diagonal classes is undefined")
        return LaurentPoly._wrap(a.ring, a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            inv = self.unit_inverse()
            if inv is None:
                raise DivisionByZero("negative power of a non-unit polynomial; use RatFun")
            return inv ** (-e)
        result = LaurentPoly.constant(self.ring, 1, self.vars)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        _check_bounds(result.terms)
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, LaurentPoly, RatFun)):
            return RatFun(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, int):
            return RatFun(LaurentPoly.constant(self.ring, other)) / RatFun(self)
        return NotImplemented

    def unit_inverse(self):
        """Inverse of a signed unit monomial, else None."""
        if len(self.terms) != 1:
            return None
        (k, c), = self.terms.items()
        if c not in (1, -1) or not self.ring.is_unit_key(k):
            return None
        return LaurentPoly(self.ring, self.vars, {tuple(-e for e in k): c})

    def shift(self, key, sign=1):
        """Multiply by the monomial ``sign * X^key`` (key in this layout)."""
        return LaurentPoly(
            self.ring, self.vars, {tuple(map(add, k, key)): c * sign for k, c in self.terms.items()}
        )

    # -- comparison ----------------------------------------------------
    def normalized(self) -> "LaurentPoly":
        if self._reduced:
            return self
        if not self.ring.relations and self.ring.marker is None:
            _check_bounds(self.terms)
            self._reduced = True
            return self
        return LaurentPoly(self.ring, self.vars, self.ring.reduce_terms(self.terms), reduced=True)

    def is_zero(self) -> bool:
        if not self.terms:
            return True
        return not self.normalized().terms

    def __eq__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            diff = self - other
            return diff.is_zero()
        if isinstance(other, RatFun):
            return RatFun.from_poly(self) == other
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        t = self.normalized().trimmed()
        return hash((t.vars, frozenset(t.terms.items())))

    def __bool__(self):
        return not self.is_zero()

    # -- inspection ----------------------------------------------------
    def is_constant(self):
        n = self.ring.ngens
        return all(not any(k[n:]) for k in self.terms)

    def is_monomial(self):
        return len(self.terms) == 1

    def as_int(self):
        t = self.normalized()
        if not t.terms:
            return 0
        if len(t.terms) == 1:
            (k, c), = t.terms.items()
            if not any(k):
                return c
        return None

    def var_exponents(self, var):
        i = self.ring.ngens + self.vars.index(var)
        return sorted({k[i] for k in self.terms})

    def degree_range(self, var):
        if var not in self.vars:
            return (0, 0)
        ex = self.var_exponents(var)
        return (ex[0], ex[-1]) if ex else (0, 0)

    def coefficient_map(self, var) -> dict:
        """``{e: coefficient of var^e}``, coefficients without ``var``."""
        if var not in self.vars:
            return {0: self} if self.terms else {}
        i = self.ring.ngens + self.vars.index(var)
        rest = tuple(v for v in self.vars if v != var)
        groups = {}
        for k, c in self.terms.items():
            groups.setdefault(k[i], {})[k[:i] + k[i + 1:]] = c
        return {e: LaurentPoly(self.ring, rest, t) for e, t in groups.items()}

    def ring_coefficients(self) -> dict:
        """``{var exponent tuple: ring element}`` of the normal form."""
        n = self.ring.ngens
        groups = {}
        for k, c in self.normalized().terms.items():
            groups.setdefault(k[n:], {})[k[:n]] = c
        return {e: LaurentPoly(self.ring, (), t, reduced=True) for e, t in groups.items()}

    def content(self):
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    # -- transformations -------------------------------------------------
    def rename(self, mapping: dict) -> "LaurentPoly":
        new = [mapping.get(v, v) for v in self.vars]
        if len(set(new)) != len(new):
            raise ValueError("renaming merges variables")
        order = sort_vars(new)
        n = self.ring.ngens
        pos = [n + order.index(v) for v in new]
        out = {}
        for k, c in self.terms.items():
            kk = list(k[:n]) + [0] * len(order)
            for p, e in zip(pos, k[n:]):
                kk[p] = e
            out[tuple(kk)] = c
        return LaurentPoly._wrap(self.ring, order, out, self._reduced)

    def substitute(self, var: str, value: "LaurentPoly") -> "LaurentPoly":
        """Replace ``var`` by a monomial ``value`` (a unit one if negative powers occur)."""
        if var not in self.vars:
            return self
        if isinstance(value, int):
            value = LaurentPoly.constant(self.ring, value)
        if len(value.terms) != 1:
            raise ValueError("substitution value must be a monomial")
        full = sort_vars(self.vars + value.vars)
        base = self.with_vars(full)
        val = value.with_vars(full)
        (vk, vc), = val.terms.items()
        unit = vc in (1, -1) and self.ring.is_unit_key(vk)
        n = self.ring.ngens
        j = n + full.index(var)
        out = {}
        cache = {}
        for k, c in base.terms.items():
            e = k[j]
            if e not in cache:
                if e < 0 and not unit:
                    raise DivisionByZero("negative power of a non-unit substitution value")
                cache[e] = (tuple(x * e for x in vk), vc ** abs(e))
            sk, sc = cache[e]
            kk = list(k)
            kk[j] = 0
            _add_into(out, tuple(map(add, kk, sk)), c * sc)
        res = LaurentPoly(self.ring, full, out)
        if var not in value.vars:
            res = res.with_vars(tuple(v for v in full if v != var))
        return res

    def __call__(self, **subs):
        out = self
        for v, val in subs.items():
            out = out.substitute(v, val)
        return out

    # -- printing --------------------------------------------------------
    def __str__(self):
        return format_terms(self.ring, self.vars, self.normalized().terms)

    def __repr__(self):
        return f"LaurentPoly({self})"


def format_mono(ring, vars, key):
    parts = []
    names = list(ring.gens) + list(vars)
    for name, e in zip(names, key):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _term_order(ring, vars):
    n = ring.ngens

    def key(item):
        k = item[0]
        return (k[n:], k[:n])

    return key


def format_terms(ring, vars, terms):
    """Canonical text: variables in lex order, multidegrees descending."""
    if not terms:
        return "0"
    items = sorted(terms.items(), key=_term_order(ring, vars), reverse=True)
    out = ""
    for i, (k, c) in enumerate(items):
        mono = format_mono(ring, vars, k)
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        if i == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out


# ---------------------------------------------------------------------------
# monomials in layout-independent form: tuple of (symbol, exponent), sorted


def _sym_order(ring):
    def key(item):
        s = item[0]
        return (1, var_key(s)) if s not in ring.index else (0, ring.index[s])

    return key


def key_to_mono(ring, vars, key):
    names = list(ring.gens) + list(vars)
    items = [(s, e) for s, e in zip(names, key) if e]
    return tuple(sorted(items, key=_sym_order(ring)))


def mono_to_key(ring, vars, mono):
    key = [0] * (ring.ngens + len(vars))
    for s, e in mono:
        if s in ring.index:
            key[ring.index[s]] += e
        else:
            key[ring.ngens + vars.index(s)] += e
    return tuple(key)


def mono_vars(ring, mono):
    return tuple(s for s, _ in mono if s not in ring.index)


def mono_inverse(mono):
    return tuple((s, -e) for s, e in mono)


def mono_mul(ring, a, b):
    acc = Counter()
    for s, e in a + b:
        acc[s] += e
    return tuple(sorted(((s, e) for s, e in acc.items() if e), key=_sym_order(ring)))


def mono_oriented(ring, mono):
    """True when the first formal variable (or, lacking one, generator) has positive exponent."""
    vs = [(s, e) for s, e in mono if s not in ring.index]
    lead = vs[0] if vs else (mono[0] if mono else None)
    return lead is None or lead[1] > 0


class Binomial:
    """The factor ``1 - sign * m`` with ``m`` a unit monomial, canonically oriented."""

    __slots__ = ("sign", "mono")

    def __init__(self, sign, mono):
        self.sign = sign
        self.mono = tuple(mono)

    def _k(self):
        return ("b", self.sign, self.mono)

    def __eq__(self, other):
        return isinstance(other, Binomial) and self._k() == other._k()

    def __hash__(self):
        return hash(self._k())

    def __lt__(self, other):
        return _factor_sort_key(self) < _factor_sort_key(other)

    def poly(self, ring, vars):
        one = (0,) * (ring.ngens + len(vars))
        k = mono_to_key(ring, vars, self.mono)
        return LaurentPoly(ring, vars, {one: 1, k: -self.sign} if k != one else {one: 1 - self.sign})

    def variables(self, ring):
        return mono_vars(ring, self.mono)

    def __repr__(self):
        return f"Binomial({self.sign}, {self.mono})"


class GeneralFactor:
    """A denominator factor that is not a unit binomial; blocks expansion."""

    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(sorted(items))

    def _k(self):
        return ("g", self.items)

    def __eq__(self, other):
        return isinstance(other, GeneralFactor) and self.items == other.items

    def __hash__(self):
        return hash(self._k())

    def __lt__(self, other):
        return _factor_sort_key(self) < _factor_sort_key(other)

    def poly(self, ring, vars):
        return LaurentPoly(ring, vars, {mono_to_key(ring, vars, m): c for m, c in self.items})

    def variables(self, ring):
        vs = set()
        for m, _ in self.items:
            vs.update(mono_vars(ring, m))
        return tuple(vs)

    def __repr__(self):
        return f"GeneralFactor({self.items})"


def _factor_sort_key(f):
    if isinstance(f, Binomial):
        return (0, tuple((var_key(s), e) for s, e in f.mono), -f.sign)
    return (1, repr(f.items))


def factor_poly(p: LaurentPoly):
    """Split ``p`` as ``content * prefactor * prod(factors)``.

    Returns ``(content > 0, prefactor poly (signed unit monomial), [factors])``.
    Binomials with unit coefficients become :class:`Binomial` factors; anything
    else is kept whole as a :class:`GeneralFactor`.
    """
    ring = p.ring
    raw = {k: c for k, c in p.terms.items() if c}
    simple = len(raw) in (1, 2) and all(ring.is_unit_key(k) for k in raw)
    # a unit monomial or binomial is kept as written: reducing t^3 modulo a
    # relation would turn 1 - t^3 x into an unfactored polynomial
    q = p.normalized() if ring.relations and not simple else LaurentPoly(ring, p.vars, raw)
    if not q.terms:
        raise DivisionByZero("division by zero")
    content = q.content()
    terms = {k: c // content for k, c in q.terms.items()}
    vars = q.vars
    width = ring.ngens + len(vars)
    if len(terms) == 1:
        (k, c), = terms.items()
        if ring.is_unit_key(k):
            return content, LaurentPoly(ring, vars, {k: c}), []
    if len(terms) == 2:
        (k1, a), (k2, b) = sorted(terms.items())
        if a in (1, -1) and b in (1, -1) and ring.is_unit_key(k1) and ring.is_unit_key(k2):
            s = -a * b
            m = tuple(y - x for x, y in zip(k1, k2))
            pre = LaurentPoly(ring, vars, {k1: a})
            mono = key_to_mono(ring, vars, m)
            if not mono_oriented(ring, mono):
                # 1 - s M = -s M (1 - s M^{-1})
                pre = pre.shift(m, -s)
                mono = mono_inverse(mono)
            return content, pre, [Binomial(s, mono)]
    # general factor: pull out the unit part of the componentwise minimum
    mins = [min(k[i] for k in terms) for i in range(width)]
    for i in range(ring.ngens):
        if not ring.invertible[i] and mins[i] < 0:
            mins[i] = 0
        elif not ring.invertible[i]:
            mins[i] = 0
    lead = max(terms)
    sign = 1 if terms[lead] > 0 else -1
    shifted = {tuple(map(sub, k, mins)): c * sign for k, c in terms.items()}
    items = [(key_to_mono(ring, vars, k), c) for k, c in shifted.items()]
    pre = LaurentPoly(ring, vars, {tuple(mins): sign})
    return content, pre, [GeneralFactor(items)]


class RatFun:
    """``num / (const * prod factor^mult)`` with tracked factored denominator."""

    __slots__ = ("num", "den", "const")

    def __init__(self, num: LaurentPoly, den=(), const=1):
        if const <= 0:
            raise ValueError("denominator constant must be positive")
        dv = set()
        for f, _ in den:
            dv.update(f.variables(num.ring))
        vars = sort_vars(num.vars + tuple(dv))
        self.num = num.with_vars(vars)
        self.den = tuple(sorted(((f, m) for f, m in den if m), key=lambda fm: _factor_sort_key(fm[0])))
        self.const = const

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_poly(cls, p: LaurentPoly):
        return cls(p)

    @classmethod
    def coerce(cls, x, ring=None):
        if isinstance(x, RatFun):
            return x
        if isinstance(x, LaurentPoly):
            return cls(x)
        if isinstance(x, int):
            if ring is None:
                raise TypeError("ring required to coerce an integer")
            return cls(LaurentPoly.constant(ring, x))
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFun")

    @classmethod
    def quotient(cls, num: LaurentPoly, den: LaurentPoly):
        return cls(num) / cls(den)

    @property
    def ring(self):
        return self.num.ring

    @property
    def vars(self):
        return self.num.vars

    def den_poly(self) -> LaurentPoly:
        out = LaurentPoly.constant(self.ring, self.const, self.vars)
        for f, m in self.den:
            out = out * (f.poly(self.ring, self.vars) ** m)
        return out

    def factors(self) -> Counter:
        return Counter(dict(self.den))

    def binomial_factors(self):
        return [(f, m) for f, m in self.den if isinstance(f, Binomial)]

    def is_factored(self):
        return self.const == 1 and all(isinstance(f, Binomial) for f, _ in self.den)

    def _with(self, num, den_counter, const):
        g = gcd(num.content(), const) if num.terms else const
        if g > 1:
            num = LaurentPoly(num.ring, num.vars, {k: c // g for k, c in num.terms.items()})
            const //= g
        return RatFun(num, tuple(den_counter.items()), const)

    def _align(self, other):
        if other.ring != self.ring:
            raise TypeError("cannot combine rational functions over different rings")
        vars = sort_vars(self.vars + other.vars)
        return self.num.with_vars(vars), other.num.with_vars(vars), vars

    # -- arithmetic --------------------------------------------------------
    def _coerce_other(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, (LaurentPoly, int)):
            return RatFun.coerce(other, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, vars = self._align(other)
        fa, fb = self.factors(), other.factors()
        lcm = fa | fb
        na = a
        for f, m in (lcm - fa).items():
            na = na * (f.poly(self.ring, vars) ** m)
        nb = b
        for f, m in (lcm - fb).items():
            nb = nb * (f.poly(self.ring, vars) ** m)
        L = self.const * other.const // gcd(self.const, other.const)
        num = na * (L // self.const) + nb * (L // other.const)
        if not num.terms:
            return RatFun(LaurentPoly(self.ring, vars, {}))
        return self._with(num, lcm, L)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, self.const)

    def __sub__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, vars = self._align(other)
        num = a * b
        if not num.terms:
            return RatFun(LaurentPoly(self.ring, vars, {}))
        return self._with(num, self.factors() + other.factors(), self.const * other.const)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        content, pre, facs = factor_poly(self.num)
        inv_pre = pre.unit_inverse()
        num = LaurentPoly.constant(self.ring, self.const, self.vars)
        for f, m in self.den:
            num = num * (f.poly(self.ring, self.vars) ** m)
        num = num * inv_pre.with_vars(sort_vars(inv_pre.vars + self.vars))
        return self._with(num, Counter(facs), content)

    def __truediv__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            raise DivisionByZero("division by zero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFun.coerce(other, self.ring) / self

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = RatFun(LaurentPoly.constant(self.ring, 1, self.vars))
        for _ in range(e):
            out = out * self
        return out

    # -- equality ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFun.coerce(other, self.ring)
        if not isinstance(other, RatFun):
            return NotImplemented
        a, b, vars = self._align(other)
        fa, fb = self.factors(), other.factors()
        common = fa & fb
        lhs = a * other.const
        for f, m in (fb - common).items():
            lhs = lhs * (f.poly(self.ring, vars) ** m)
        rhs = b * self.const
        for f, m in (fa - common).items():
            rhs = rhs * (f.poly(self.ring, vars) ** m)
        return (lhs - rhs).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    def is_zero(self):
        return self.num.is_zero()

    # -- simplification ------------------------------------------------------
    def simplified(self) -> "RatFun":
        """Cancel denominator factors that divide the numerator exactly."""
        num = self.num
        den = self.factors()
        for f in list(den):
            fp = f.poly(self.ring, self.vars)
            while den[f] > 0:
                q = exact_divide_terms(num.terms, fp.terms) if num.terms else {}
                if q is None:
                    break
                num = LaurentPoly(self.ring, self.vars, q)
                den[f] -= 1
        den = +den
        if not num.terms:
            return RatFun(LaurentPoly(self.ring, self.vars, {}))
        return self._with(num, den, self.const)

    def as_polynomial(self) -> LaurentPoly:
        return as_polynomial(self)

    def substitute(self, var, value) -> "RatFun":
        return substitute(self, var, value)

    def rename(self, mapping) -> "RatFun":
        ring = self.ring
        num = self.num.rename(mapping)
        den = Counter()
        for f, m in self.den:
            if isinstance(f, Binomial):
                mono = tuple(sorted(((mapping.get(s, s), e) for s, e in f.mono), key=_sym_order(ring)))
                if mono_oriented(ring, mono):
                    den[Binomial(f.sign, mono)] += m
                else:
                    # 1/(1 - sM) = (-s M^{-1}) / (1 - s M^{-1})
                    pre = LaurentPoly.from_mono(ring, sort_vars(mono_vars(ring, mono)), mono_inverse(mono), -f.sign)
                    num = num * (pre**m)
                    den[Binomial(f.sign, mono_inverse(mono))] += m
            else:
                items = [
                    (tuple(sorted(((mapping.get(s, s), e) for s, e in mono), key=_sym_order(ring))), c)
                    for mono, c in f.items
                ]
                den[GeneralFactor(items)] += m
        return RatFun(num, tuple(den.items()), self.const)

    # -- printing --------------------------------------------------------------
    def __str__(self):
        s = self.simplified()
        num = str(s.num)
        if not s.den and s.const == 1:
            return num
        parts = []
        if s.const != 1:
            parts.append(str(s.const))
        for f, m in s.den:
            if isinstance(f, Binomial):
                mono = LaurentPoly.from_mono(s.ring, s.vars, f.mono).trimmed()
                body = f"(1 {'-' if f.sign > 0 else '+'} {mono})"
            else:
                body = "(" + str(f.poly(s.ring, s.vars).trimmed()) + ")"
            parts.append(body if m == 1 else f"{body}^{m}")
        numtxt = num if len(s.num.terms) <= 1 else f"({num})"
        return f"{numtxt}/" + ("*".join(parts) if len(parts) == 1 else "(" + "*".join(parts) + ")")

    def __repr__(self):
        return f"RatFun({self})"


def as_polynomial(f) -> LaurentPoly:
    """The Laurent polynomial equal to ``f``; NotPolynomial if none exists."""
    if isinstance(f, LaurentPoly):
        return f
    s = f.simplified()
    if s.den:
        raise NotPolynomial(f"{f} is not a Laurent polynomial")
    if s.const != 1:
        raise NotPolynomial(f"{f} has a non-unit integer denominator")
    return s.num


def substitute(f, var: str, value) -> RatFun:
    """Substitute a unit monomial for ``var``; DenominatorVanishes if the denominator dies."""
    if isinstance(f, LaurentPoly):
        f = RatFun(f)
    ring = f.ring
    if isinstance(value, int):
        value = LaurentPoly.constant(ring, value)
    if value.ring != ring:
        raise TypeError("substitution value over a different ring")
    num = f.num.substitute(var, value)
    out = RatFun(num)
    rest = Counter()
    for fac, m in f.den:
        if var not in fac.variables(ring):
            rest[fac] += m
            continue
        p = fac.poly(ring, f.vars).substitute(var, value)
        if p.is_zero():
            raise DenominatorVanishes(f"substituting {var} -> {value} kills the denominator factor {fac}")
        out = out * (RatFun(p).inverse() ** m)
    if rest:
        out = out * RatFun(LaurentPoly.constant(ring, 1), tuple(rest.items()))
    if f.const != 1:
        out = out * RatFun(LaurentPoly.constant(ring, 1), (), f.const)
    return out


def symmetrize(f, variables) -> RatFun:
    """``sum over sigma in S_n of sigma(f)`` permuting the given variables."""
    if isinstance(f, LaurentPoly):
        f = RatFun(f)
    variables = list(variables)
    extra = [v for v in f.vars if v not in variables]
    if extra:
        raise ValueError(f"symmetrize: unexpected variables {extra}")
    total = None
    for perm in itertools.permutations(variables):
        mapping = dict(zip(variables, perm))
        term = f.rename(mapping)
        total = term if total is None else total + term
    return total


def arith(a, b, op: str):
    """``a op b`` for op in ``+ - * /``, simplified."""
    a = RatFun.coerce(a, getattr(b, "ring", None))
    b = RatFun.coerce(b, a.ring)
    if op == "+":
        r = a + b
    elif op in ("-", "−"):
        r = a - b
    elif op in ("*", "×"):
        r = a * b
    elif op in ("/", "÷"):
        r = a / b
    else:
        raise ValueError(f"unknown operator {op!r}")
    return r.simplified()
