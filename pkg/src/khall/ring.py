"""Finitely presented commutative rings with distinguished invertible generators.

A ring is ``Z[g_1, ..., g_n]`` (with ``g_i^{-1}`` adjoined for invertible
generators) modulo monic univariate relations ``p_i(g_i) = 0``.  Normal forms
keep every relation-carrying generator in degree ``0 <= e < deg p_i`` and all
other exponents as they are, so equality of normal forms is equality in the
ring.

One generator may be declared a *diagonal marker* ``D``: ``D*D`` is an error,
and inside any term containing ``D`` the listed generator pairs are identified
(``D*(a - b) = 0``).  This is how the ``[O_Delta]`` bookkeeping of the Hecke
computation is carried.

Elements themselves are :class:`khall.laurent.LaurentPoly` objects with no
formal variables; the ring only knows how to reduce sparse exponent maps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    DiagonalSquare,
    ExponentOverflow,
    NameCollision,
    NonInvertibleGenerator,
    UnknownGenerator,
    UnsupportedRelation,
)

EXPONENT_LIMIT = 2**31

_FORMAL = re.compile(r"^[xyzw][0-9]*$")


def is_formal_variable(name: str) -> bool:
    """Formal variables are ``x, y, z, w`` optionally followed by digits."""
    return bool(_FORMAL.match(name))


def var_key(name: str):
    """Sort key putting ``z2`` before ``z10``."""
    m = re.match(r"^(.*?)([0-9]*)$", name)
    return (m.group(1), int(m.group(2)) if m.group(2) else -1, name)


def _polymulmod(a, b, p):
    """Multiply univariate coefficient lists ``a*b`` modulo monic ``p``."""
    d = len(p) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            for j in range(d + 1):
                out[k - d + j] -= c * p[j]
    out = out[:d] + [0] * (d - len(out))
    return tuple(out[:d])


@dataclass(frozen=True)
class RingPresentation:
    """Generators ``(name, invertible)`` and relations.

    Each relation is either a coefficient list ``(name, (a_0, ..., a_d))`` for
    ``sum a_k name^k``, or anything :func:`relation_from_expression` accepts
    (an expression string such as ``"(t-1)^3"``).
    """

    generators: tuple = ()
    relations: tuple = ()
    marker: str | None = None
    identify: tuple = ()
    label: str = ""


class Ring:
    """Immutable handle for a presented ring; see module docstring."""

    def __init__(self, generators, relations=None, marker=None, identify=(), label=""):
        gens = []
        inv = []
        for g in generators:
            if isinstance(g, str):
                name, invertible = g, True
            else:
                name, invertible = g
            if name in gens:
                raise NameCollision(f"generator {name!r} declared twice")
            if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", name) or is_formal_variable(name):
                raise UnknownGenerator(f"invalid generator name {name!r}")
            gens.append(name)
            inv.append(bool(invertible))
        self.gens = tuple(gens)
        self.invertible = tuple(inv)
        self.index = {g: i for i, g in enumerate(self.gens)}
        self.label = label

        rels = {}
        for gname, coeffs in (relations or {}).items():
            if gname not in self.index:
                raise UnknownGenerator(f"relation mentions unknown generator {gname!r}")
            coeffs = list(coeffs)
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            if len(coeffs) < 2:
                raise UnsupportedRelation(f"relation for {gname!r} must have degree >= 1")
            lead = coeffs[-1]
            if lead not in (1, -1):
                raise UnsupportedRelation(f"relation for {gname!r} is not monic")
            coeffs = [c * lead for c in coeffs]
            i = self.index[gname]
            if i in rels:
                raise UnsupportedRelation(f"two relations for {gname!r}")
            rels[i] = tuple(coeffs)
        self.relations = rels

        self.marker = None
        self.identify = ()
        if marker is not None:
            if marker not in self.index:
                raise UnknownGenerator(f"unknown marker {marker!r}")
            m = self.index[marker]
            if self.invertible[m] or m in rels:
                raise UnsupportedRelation("diagonal marker must be a plain non-invertible generator")
            self.marker = m
            pairs = []
            for src, dst in identify:
                if src not in self.index or dst not in self.index:
                    raise UnknownGenerator(f"identification {src}->{dst} uses unknown generator")
                pairs.append((self.index[src], self.index[dst]))
            self.identify = tuple(pairs)

        # precomputed inverses of relation generators: g^{-1} as a coefficient list
        self._inverse = {}
        for i, p in rels.items():
            if not self.invertible[i]:
                continue
            a0 = p[0]
            if a0 not in (1, -1):
                raise NonInvertibleGenerator(
                    f"{self.gens[i]} is not a unit modulo its relation (constant term {a0})"
                )
            d = len(p) - 1
            # g * (g^{d-1} + p_{d-1} g^{d-2} + ... + p_1) = -p_0
            q = [p[k] for k in range(1, d)] + [1]
            self._inverse[i] = tuple(-a0 * c for c in q)
        self._powers = {}

    # ------------------------------------------------------------------
    @property
    def ngens(self):
        return len(self.gens)

    def presentation(self):
        rels = tuple((self.gens[i], p) for i, p in sorted(self.relations.items()))
        ident = tuple((self.gens[a], self.gens[b]) for a, b in self.identify)
        marker = self.gens[self.marker] if self.marker is not None else None
        return (tuple(zip(self.gens, self.invertible)), rels, marker, ident)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.presentation() == other.presentation()

    def __hash__(self):
        return hash(self.presentation())

    def __repr__(self):
        parts = []
        for g, inv in zip(self.gens, self.invertible):
            parts.append(g + ("^±" if inv else ""))
        s = "Z[" + ", ".join(parts) + "]"
        if self.relations:
            rels = []
            for i, p in sorted(self.relations.items()):
                rels.append(_format_univariate(self.gens[i], p))
            s += "/(" + ", ".join(rels) + ")"
        if self.label:
            s = f"{self.label}: {s}"
        return s

    # ------------------------------------------------------------------
    def adjoin_units(self, names) -> "Ring":
        """Free extension by new invertible generators (no new relations)."""
        names = list(names)
        if not names:
            return self
        seen = set(self.gens)
        for n in names:
            if n in seen:
                raise NameCollision(f"generator {n!r} already present")
            seen.add(n)
        rels = {self.gens[i]: p for i, p in self.relations.items()}
        marker = self.gens[self.marker] if self.marker is not None else None
        ident = [(self.gens[a], self.gens[b]) for a, b in self.identify]
        gens = list(zip(self.gens, self.invertible)) + [(n, True) for n in names]
        return Ring(gens, rels, marker, ident, self.label)

    def cover(self) -> "Ring":
        """Same generators, marker and identification, but no relations."""
        marker = self.gens[self.marker] if self.marker is not None else None
        ident = [(self.gens[a], self.gens[b]) for a, b in self.identify]
        return Ring(list(zip(self.gens, self.invertible)), {}, marker, ident, self.label)

    def is_unit_key(self, key) -> bool:
        """True when the generator part of ``key`` is a product of invertible generators."""
        for i, e in enumerate(key[: self.ngens]):
            if e and not self.invertible[i]:
                return False
        return True

    # ------------------------------------------------------------------
    def _power(self, i, e):
        """Normal form of ``g_i^e`` as coefficient tuple of length ``deg p_i``."""
        cache = self._powers
        hit = cache.get((i, e))
        if hit is not None:
            return hit
        p = self.relations[i]
        d = len(p) - 1
        if 0 <= e < d:
            res = tuple(1 if k == e else 0 for k in range(d))
        elif e >= d:
            res = _polymulmod(self._power(i, e - 1), self._power(i, 1), p)
        else:
            if i not in self._inverse:
                raise NonInvertibleGenerator(f"negative power of non-invertible {self.gens[i]}")
            if e == -1:
                res = self._inverse[i]
            else:
                res = _polymulmod(self._power(i, e + 1), self._inverse[i], p)
        cache[(i, e)] = res
        return res

    def reduce_terms(self, terms: dict) -> dict:
        """Reduce a sparse ``{key: int}`` map (keys start with generator exponents)."""
        n = self.ngens
        rels = self.relations
        marker = self.marker
        noninv = [i for i in range(n) if not self.invertible[i]]
        bounded = [(i, len(p) - 1) for i, p in rels.items()]
        out = {}
        get = out.get
        for key, c in terms.items():
            if not c:
                continue
            if key and (max(key) > EXPONENT_LIMIT or min(key) < -EXPONENT_LIMIT):
                raise ExponentOverflow("exponent exceeds 2^31")
            for i in noninv:
                if key[i] < 0:
                    raise NonInvertibleGenerator(f"negative power of non-invertible {self.gens[i]}")
            if marker is not None and key[marker]:
                if key[marker] > 1:
                    raise DiagonalSquare("product of two diagonal classes is undefined")
                if self.identify:
                    gk = list(key[:n])
                    for src, dst in self.identify:
                        if gk[src]:
                            gk[dst] += gk[src]
                            gk[src] = 0
                    key = tuple(gk) + key[n:]
            if all(0 <= key[i] < d for i, d in bounded):
                v = get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    del out[key]
                continue
            gk = list(key[:n])
            partial = [(gk, c)]
            for i in rels:
                e = gk[i]
                d = len(rels[i]) - 1
                if 0 <= e < d:
                    continue
                pw = self._power(i, e)
                nxt = []
                for g2, c2 in partial:
                    for k, a in enumerate(pw):
                        if a:
                            g3 = list(g2)
                            g3[i] = k
                            nxt.append((g3, c2 * a))
                partial = nxt
            tail = tuple(key[n:])
            for g2, c2 in partial:
                k = tuple(g2) + tail
                v = out.get(k, 0) + c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return out

    # ------------------------------------------------------------------
    # element constructors (thin wrappers over LaurentPoly)
    def one(self):
        from .laurent import LaurentPoly

        return LaurentPoly.constant(self, 1)

    def zero(self):
        from .laurent import LaurentPoly

        return LaurentPoly.constant(self, 0)

    def gen(self, name: str):
        from .laurent import LaurentPoly

        if name not in self.index:
            raise UnknownGenerator(f"unknown generator {name!r}")
        key = tuple(1 if g == name else 0 for g in self.gens)
        return LaurentPoly(self, (), {key: 1})

    def unit(self, exps: dict, sign: int = 1):
        """The unit monomial ``sign * prod g^e`` as a ring element."""
        from .laurent import LaurentPoly

        key = [0] * self.ngens
        for g, e in exps.items():
            if g not in self.index:
                raise UnknownGenerator(f"unknown generator {g!r}")
            if e < 0 and not self.invertible[self.index[g]]:
                raise NonInvertibleGenerator(f"{g} is not invertible")
            key[self.index[g]] = e
        return LaurentPoly(self, (), {tuple(key): sign})

    def inverse_of_generator(self, name: str):
        return self.unit({name: -1})

    def normalize(self, e):
        """Normal form of ``e`` (an int, expression string or LaurentPoly over this ring)."""
        from .laurent import LaurentPoly

        if isinstance(e, int):
            return LaurentPoly.constant(self, e)
        if isinstance(e, str):
            from .parser import parse_in_ring

            e = parse_in_ring(e, self)
        if not isinstance(e, LaurentPoly):
            raise TypeError(f"cannot normalize {type(e).__name__}")
        if e.ring != self:
            missing = [g for g in e.ring.gens if g not in self.index]
            if missing:
                raise UnknownGenerator(f"unknown generator(s) {', '.join(missing)}")
            e = e.embed(self)
        return e.normalized()


def _format_univariate(name, coeffs):
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        mono = "" if k == 0 else (name if k == 1 else f"{name}^{k}")
        if not mono:
            s = str(abs(c))
        elif abs(c) == 1:
            s = mono
        else:
            s = f"{abs(c)}*{mono}"
        terms.append(("-" if c < 0 else "+", s))
    out = ""
    for i, (sg, s) in enumerate(terms):
        if i == 0:
            out = ("-" if sg == "-" else "") + s
        else:
            out += f" {sg} {s}"
    return out or "0"


def make_ring(presentation: RingPresentation) -> Ring:
    """Build a :class:`Ring` from a presentation, parsing relation expressions."""
    rels = {}
    for rel in presentation.relations:
        if isinstance(rel, tuple) and len(rel) == 2 and isinstance(rel[0], str) and not isinstance(rel[1], str):
            name, coeffs = rel
        else:
            name, coeffs = relation_from_expression(rel, [g if isinstance(g, str) else g[0] for g in presentation.generators])
        if name in rels:
            raise UnsupportedRelation(f"two relations for {name!r}")
        rels[name] = coeffs
    return Ring(presentation.generators, rels, presentation.marker, presentation.identify, presentation.label)


def relation_from_expression(expr, gens):
    """Turn a univariate polynomial expression into ``(generator, coefficients)``."""
    from .laurent import LaurentPoly
    from .parser import parse_in_ring

    free = Ring([(g, False) for g in gens])
    poly = expr if isinstance(expr, LaurentPoly) else parse_in_ring(str(expr), free, allow_inverse=False)
    if poly.vars:
        raise UnsupportedRelation("relations may only involve generators")
    used = sorted({i for k in poly.terms for i, e in enumerate(k) if e})
    if len(used) != 1:
        raise UnsupportedRelation(
            "only univariate relations (one generator each) are supported; got " + str(expr)
        )
    i = used[0]
    coeffs = {}
    for k, c in poly.terms.items():
        if k[i] < 0:
            raise UnsupportedRelation("relations must be polynomials")
        coeffs[k[i]] = c
    d = max(coeffs)
    return free.gens[i], [coeffs.get(k, 0) for k in range(d + 1)]


@lru_cache(maxsize=None)
def preset(name: str) -> Ring:
    """Named toy models: ``Z``, ``P2``, ``P1xP1`` and the relation-free ``free``."""
    key = name.lower()
    if key in ("z", "free"):
        return Ring([], label="Z" if key == "z" else "free")
    if key == "p2":
        # K(P^2) = Z[t^±]/(t-1)^3, t = [O(1)]
        return Ring([("t", True)], {"t": [-1, 3, -3, 1]}, label="P2")
    if key == "p1xp1":
        return Ring([("a", True), ("b", True)], {"a": [1, -2, 1], "b": [1, -2, 1]}, label="P1xP1")
    raise UnknownGenerator(f"unknown ring preset {name!r}")


def parse_inline_ring(text: str) -> Ring:
    """Inline presentation ``"t:(t-1)^3, s"``: each entry a generator with optional relation."""
    text = text.strip()
    if not text:
        return Ring([], label="inline")
    gens = []
    rel_text = {}
    for entry in text.split(","):
        entry = entry.strip()
        if not entry:
            continue
        if ":" in entry:
            name, rel = entry.split(":", 1)
            name = name.strip()
            rel_text[name] = rel.strip()
        else:
            name = entry
        gens.append((name, True))
    names = [g for g, _ in gens]
    rels = {}
    for name, rel in rel_text.items():
        gname, coeffs = relation_from_expression(rel, names)
        if gname != name:
            raise UnsupportedRelation(f"relation after {name}: must involve {name} only")
        rels[name] = coeffs
    return Ring(gens, rels, label="inline")


def ring_from_text(text: str) -> Ring:
    try:
        return preset(text)
    except UnknownGenerator:
        return parse_inline_ring(text)
