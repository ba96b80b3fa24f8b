"""The shuffle algebra of symmetric Laurent polynomials.

Degree ``n`` elements are symmetric Laurent polynomials in ``z1..zn`` with
integer coefficients.  The product of ``f`` (degree ``n``) and ``g`` (degree
``m``) is the sum over ``(n, m)``-shuffles of

    f(z_S) g(z_T) / prod_{a in S, b in T} (1 - z_a / z_b),

which is a Laurent polynomial again.  Summing over shuffles rather than over
all of ``S_{n+m}`` keeps the degree-0 element ``1`` a two-sided unit.  The
two conventions differ by the factor ``n! m!``, which is 1 in degree (1, 1).
"""

from __future__ import annotations

import itertools

from .errors import KhallError, NotPolynomial, NotSymmetric
from .laurent import LaurentPoly, exact_divide_terms
from .ring import Ring, preset


def zvars(n: int) -> tuple:
    return tuple(f"z{i}" for i in range(1, n + 1))


def _check_vars(p: LaurentPoly, n: int):
    allowed = set(zvars(n))
    for v in p.trimmed().vars:
        if v not in allowed:
            raise NotSymmetric(f"variable {v} is not among z1..z{n}")


def canonicalize(p, n: int | None = None, ring: Ring | None = None) -> "ShuffleElement":
    """Check that ``p`` is symmetric in ``z1..zn`` and wrap it.

    When ``n`` is omitted it is the largest index of a ``z`` variable in ``p``.
    """
    if isinstance(p, int):
        p = LaurentPoly.constant(ring or preset("z"), p)
    p = p.trimmed()
    if n is None:
        n = 0
        for v in p.vars:
            if v[:1] != "z" or not v[1:].isdigit():
                raise NotSymmetric(f"variable {v} is not of the form z<i>")
            n = max(n, int(v[1:]))
    _check_vars(p, n)
    names = zvars(n)
    p = p.with_vars(names).normalized()
    # adjacent transpositions generate S_n
    for i in range(n - 1):
        swapped = p.rename({names[i]: names[i + 1], names[i + 1]: names[i]})
        if swapped != p:
            raise NotSymmetric(f"not invariant under swapping {names[i]} and {names[i + 1]}")
    return ShuffleElement(n, p)


class ShuffleElement:
    """Homogeneous element of the shuffle algebra."""

    __slots__ = ("degree", "poly")

    def __init__(self, degree: int, poly: LaurentPoly):
        if degree < 0:
            raise KhallError("degree must be non-negative")
        self.degree = degree
        self.poly = poly.with_vars(zvars(degree))

    @classmethod
    def one(cls, ring: Ring | None = None):
        return cls(0, LaurentPoly.constant(ring or preset("z"), 1))

    @property
    def ring(self):
        return self.poly.ring

    def __add__(self, other):
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        if other.degree != self.degree:
            raise KhallError("only elements of the same degree can be added")
        return ShuffleElement(self.degree, self.poly + other.poly)

    def __neg__(self):
        return ShuffleElement(self.degree, -self.poly)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return ShuffleElement(self.degree, self.poly * other)
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return shuffle_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return ShuffleElement(self.degree, self.poly * other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            other = ShuffleElement(self.degree, LaurentPoly.constant(self.ring, other))
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return self.degree == other.degree and self.poly == other.poly

    __hash__ = None

    def is_zero(self):
        return self.poly.is_zero()

    def to_json(self) -> dict:
        p = self.poly.normalized()
        n = self.ring.ngens
        terms = []
        coeffs = {}
        for k, c in p.terms.items():
            coeffs.setdefault(k[n:], {})[k[:n]] = c
        for md in sorted(coeffs, reverse=True):
            value = LaurentPoly(self.ring, (), coeffs[md])
            terms.append({"multidegree": list(md), "coefficient": str(value)})
        return {"degree": self.degree, "value": str(p), "terms": terms}

    def __str__(self):
        return str(self.poly)

    def __repr__(self):
        return f"ShuffleElement({self.degree}, {self.poly})"


def _monomial(ring, vars, exps: dict, coeff: int = 1) -> LaurentPoly:
    key = (0,) * ring.ngens + tuple(exps.get(v, 0) for v in vars)
    return LaurentPoly(ring, vars, {key: coeff})


def shuffle_mul(f: ShuffleElement, g: ShuffleElement) -> ShuffleElement:
    """Shuffle product, computed exactly over the common denominator.

    Every shuffle term is multiplied by ``Delta = prod_{a<b} (1 - z_a/z_b)``,
    which turns it into a Laurent polynomial; the sum is then divided by
    ``Delta`` exactly.
    """
    n, m = f.degree, g.degree
    ring = f.ring
    if g.ring != ring:
        raise KhallError("factors live over different rings")
    N = n + m
    names = zvars(N)
    one = LaurentPoly.constant(ring, 1).with_vars(names)
    if n == 0 or m == 0:
        c, h = (f, g) if n == 0 else (g, f)
        return ShuffleElement(h.degree, c.poly.with_vars(()) * h.poly)

    def factor(a, b):
        # 1 - z_a/z_b
        return one - _monomial(ring, names, {names[a]: 1, names[b]: -1})

    delta = one
    for a, b in itertools.combinations(range(N), 2):
        delta = delta * factor(a, b)

    fsrc, gsrc = zvars(n), zvars(m)
    total = LaurentPoly(ring, names, {})
    for S in itertools.combinations(range(N), n):
        T = [i for i in range(N) if i not in S]
        fs = _place(f.poly, fsrc, [names[i] for i in S])
        gs = _place(g.poly, gsrc, [names[j] for j in T])
        term = fs.with_vars(names) * gs.with_vars(names)
        inside = set(S)
        for a, b in itertools.combinations(range(N), 2):
            if (a in inside) == (b in inside):
                term = term * factor(a, b)
            elif b in inside:
                # crossing pair with the S-index after the T-index:
                # 1/(1 - z_b/z_a) = -(z_a/z_b) / (1 - z_a/z_b)
                term = term * _monomial(ring, names, {names[a]: 1, names[b]: -1}, -1)
        total = total + term
    total = total.normalized()
    q = exact_divide_terms(total.terms, delta.terms)
    if q is None:
        raise NotPolynomial("shuffle product is not a Laurent polynomial")
    return ShuffleElement(N, LaurentPoly(ring, names, q).normalized())


def _place(p: LaurentPoly, src, dst) -> LaurentPoly:
    """Rename ``src[i] -> dst[i]`` simultaneously."""
    mapping = dict(zip(src, dst))
    tmp = {v: f"y{900 + i}" for i, v in enumerate(src)}
    stage = p.rename(tmp)
    return stage.rename({tmp[v]: mapping[v] for v in src})


def from_expression(text: str, degree: int | None = None, ring: Ring | None = None) -> ShuffleElement:
    """Parse ``text`` as a shuffle element; a bare ``z`` means ``z1``.

    Without an explicit ``degree`` the degree is the largest ``z`` index that
    occurs, but at least 1 (so ``"1"`` is the constant of degree 1).
    """
    from .parser import parse_in_ring

    ring = ring or preset("z")
    p = parse_in_ring(text, ring)
    if isinstance(p, int):
        p = LaurentPoly.constant(ring, p)
    if "z" in p.vars:
        if "z1" in p.vars:
            raise NotSymmetric("use either z or z1, not both")
        p = p.rename({"z": "z1"})
    if degree is None:
        degree = max(1, canonicalize(p, None, ring).degree)
    return canonicalize(p, degree, ring)
