"""Expression syntax: tokenizer, recursive-descent parser, printer and lowering.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``* /``, which bind tighter than ``+ -``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-" | "+"] INT)?
    atom   := INT | NAME | "(" expr ")" | klass
            | "delta" "(" expr ")"
            | ("wedge" | "sym") "(" klass [("*" | "/") unary] ")"
            | "at" "(" expr "," NAME "," ("inf" | "zero" | "both") ")"
    klass  := "K" "[" [item ("," item)*] "]"
    item   := ["+" | "-"] term

Names matching ``[xyzw][0-9]*`` are formal variables; every other name is a
ring generator (adjoined as a free unit when lowering allows it).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ExprSyntaxError, KhallError, UnknownGenerator
from .ring import Ring, is_formal_variable

KEYWORDS = {"delta", "wedge", "sym", "at"}
DIRECTIONS = ("inf", "zero", "both")


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class KLit:
    items: tuple  # ((sign, expr), ...)


@dataclass(frozen=True)
class DeltaNode:
    arg: object


@dataclass(frozen=True)
class SeriesNode:
    kind: str  # "wedge" or "sym"
    klass: KLit
    op: str | None = None  # "*", "/" or None
    scale: object = None


@dataclass(frozen=True)
class AtNode:
    expr: object
    var: str
    direction: str


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<int>[0-9]+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\],])"
)
_UNICODE = {"−": "-", "×": "*", "·": "*", "÷": "/"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str):
    for a, b in _UNICODE.items():
        text = text.replace(a, b)
    pos, line, col = 0, 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            out.append(Token(kind, s, line, col))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, tok.line, tok.column)

    def expect(self, text):
        t = self.peek()
        if t.text != text or t.kind not in ("op", "name"):
            what = "end of input" if t.kind == "eof" else repr(t.text)
            self.error(f"expected {text!r}, found {what}")
        return self.next()

    def parse(self):
        e = self.expr()
        if self.peek().kind != "eof":
            t = self.peek()
            if t.text == ")":
                self.error("unbalanced ')'")
            self.error(f"unexpected {t.text!r}")
        return e

    def expr(self):
        left = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            sign = 1
            paren = False
            if self.peek().text == "(":
                self.next()
                paren = True
            if self.peek().kind == "op" and self.peek().text in "+-":
                sign = -1 if self.next().text == "-" else 1
            t = self.peek()
            if t.kind != "int":
                self.error("exponent must be an integer")
            self.next()
            if paren:
                self.expect(")")
            return Pow(base, sign * int(t.text))
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return Int(int(t.text))
        if t.kind == "op" and t.text == "(":
            self.next()
            e = self.expr()
            if self.peek().text != ")":
                self.error("unbalanced '(': expected ')'")
            self.next()
            return e
        if t.kind == "name":
            if t.text == "K" and self.peek(1).text == "[":
                return self.klass()
            if t.text in KEYWORDS and self.peek(1).text == "(":
                return self.call()
            self.next()
            return Name(t.text)
        if t.kind == "eof":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def klass(self):
        self.expect("K")
        self.expect("[")
        items = []
        if self.peek().text != "]":
            while True:
                sign = 1
                if self.peek().kind == "op" and self.peek().text in "+-":
                    sign = -1 if self.next().text == "-" else 1
                items.append((sign, self.term()))
                if self.peek().text == ",":
                    self.next()
                    continue
                break
        if self.peek().text != "]":
            self.error("unbalanced '[': expected ']'")
        self.next()
        return KLit(tuple(items))

    def call(self):
        name = self.next().text
        self.expect("(")
        if name == "delta":
            node = DeltaNode(self.expr())
        elif name in ("wedge", "sym"):
            if not (self.peek().text == "K" and self.peek(1).text == "["):
                self.error(f"{name}() expects a K[...] literal")
            k = self.klass()
            op = scale = None
            if self.peek().kind == "op" and self.peek().text in "*/":
                op = self.next().text
                scale = self.unary()
            node = SeriesNode(name, k, op, scale)
        else:
            e = self.expr()
            self.expect(",")
            v = self.peek()
            if v.kind != "name" or not is_formal_variable(v.text):
                self.error("at() expects a formal variable")
            self.next()
            self.expect(",")
            d = self.peek()
            if d.text not in DIRECTIONS:
                self.error("direction must be inf, zero or both")
            self.next()
            node = AtNode(e, v.text, d.text)
        if self.peek().text != ")":
            self.error(f"unbalanced '(' in {name}(): expected ')'")
        self.next()
        return node


def parse(text: str):
    """Parse ``text`` into an AST; raises :class:`ExprSyntaxError` with position."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_text(node) -> str:
    """Canonical text; ``parse(to_text(e)) == e``."""
    if isinstance(node, Int):
        return str(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) < 3:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        lt = to_text(node.left)
        if _prec(node.left) < p:
            lt = f"({lt})"
        rt = to_text(node.right)
        if _prec(node.right) <= p:
            rt = f"({rt})"
        if node.op in "+-":
            return f"{lt} {node.op} {rt}"
        return f"{lt}{node.op}{rt}"
    if isinstance(node, Pow):
        bt = to_text(node.base)
        if _prec(node.base) < 5:
            bt = f"({bt})"
        return f"{bt}^{node.exp}"
    if isinstance(node, KLit):
        items = []
        for sign, e in node.items:
            t = to_text(e)
            if _prec(e) < 2:
                t = f"({t})"
            items.append(("+" if sign > 0 else "-") + t)
        return "K[" + ",".join(items) + "]"
    if isinstance(node, DeltaNode):
        return f"delta({to_text(node.arg)})"
    if isinstance(node, SeriesNode):
        s = to_text(node.klass)
        if node.op is not None:
            t = to_text(node.scale)
            if _prec(node.scale) < 3:
                t = f"({t})"
            s += node.op + t
        return f"{node.kind}({s})"
    if isinstance(node, AtNode):
        return f"at({to_text(node.expr)}, {node.var}, {node.direction})"
    raise TypeError(f"not an expression node: {node!r}")


def names_in(node) -> set:
    """All identifiers (generators and variables) used in an AST."""
    out = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Name):
            out.add(n.name)
        elif isinstance(n, Neg):
            stack.append(n.operand)
        elif isinstance(n, BinOp):
            stack += [n.left, n.right]
        elif isinstance(n, Pow):
            stack.append(n.base)
        elif isinstance(n, KLit):
            stack += [e for _, e in n.items]
        elif isinstance(n, DeltaNode):
            stack.append(n.arg)
        elif isinstance(n, SeriesNode):
            stack.append(n.klass)
            if n.scale is not None:
                stack.append(n.scale)
        elif isinstance(n, AtNode):
            stack.append(n.expr)
            out.add(n.var)
    return out


# ---------------------------------------------------------------------------
# lowering


def _poly_value(node, ring: Ring):
    """Evaluate a node that must be a Laurent polynomial."""
    from .laurent import LaurentPoly

    if isinstance(node, Int):
        return LaurentPoly.constant(ring, node.value)
    if isinstance(node, Name):
        if is_formal_variable(node.name):
            return LaurentPoly.variable(ring, node.name)
        if node.name not in ring.index:
            raise UnknownGenerator(f"unknown generator {node.name!r}")
        return ring.gen(node.name)
    if isinstance(node, Neg):
        return -_poly_value(node.operand, ring)
    if isinstance(node, Pow):
        return _poly_value(node.base, ring) ** node.exp
    if isinstance(node, BinOp):
        a = _poly_value(node.left, ring)
        b = _poly_value(node.right, ring)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        inv = b.unit_inverse()
        if inv is None:
            raise KhallError(f"division by the non-monomial {b} in a polynomial expression")
        return a * inv
    raise KhallError(f"{to_text(node)} is not a polynomial expression")


def parse_in_ring(text: str, ring: Ring, allow_inverse: bool = True):
    """Parse a Laurent polynomial over ``ring``; unknown generator names are errors."""
    node = parse(text)
    if not allow_inverse:
        stack = [node]
        while stack:
            n = stack.pop()
            if isinstance(n, Pow) and n.exp < 0 or isinstance(n, BinOp) and n.op == "/":
                raise KhallError("negative powers are not allowed here")
            if isinstance(n, (Neg,)):
                stack.append(n.operand)
            elif isinstance(n, BinOp):
                stack += [n.left, n.right]
            elif isinstance(n, Pow):
                stack.append(n.base)
    return _poly_value(node, ring)


class _Fact:
    """Product ``coef * prod base^exp`` kept unexpanded so denominators stay factored."""

    def __init__(self, coef, factors=()):
        self.coef = coef  # RatFun
        self.factors = list(factors)  # [(LaurentPoly, int)]

    def ratfun(self):
        from .laurent import RatFun

        out = self.coef
        for p, e in self.factors:
            if e > 0:
                out = out * RatFun(p ** e)
            elif e < 0:
                out = out * (RatFun(p).inverse() ** (-e))
        return out


def _as_fact(v):
    from .laurent import LaurentPoly, RatFun

    if isinstance(v, _Fact):
        return v
    if isinstance(v, LaurentPoly):
        if len(v.terms) <= 1:
            return _Fact(RatFun(v))
        return _Fact(RatFun(LaurentPoly.constant(v.ring, 1)), [(v, 1)])
    if isinstance(v, RatFun):
        return _Fact(v)
    raise TypeError


class Lowering:
    """Evaluate an AST over ``ring`` (extended by unknown generator names)."""

    def __init__(self, ring: Ring, order: int, auto_adjoin: bool = True):
        self.ring = ring
        self.order = order
        self.auto_adjoin = auto_adjoin

    def prepare(self, node):
        missing = sorted(n for n in names_in(node) if not is_formal_variable(n) and n not in self.ring.index)
        if missing:
            if not self.auto_adjoin:
                raise UnknownGenerator(f"unknown generator(s) {', '.join(missing)}")
            self.ring = self.ring.adjoin_units(missing)

    def run(self, node):
        self.prepare(node)
        return finalize(self.value(node))

    def value(self, node):
        from .distcalc import FormalDist, Series, delta, expand, two_sided
        from .kclass import KClass, sym_series, wedge_series
        from .laurent import LaurentPoly, RatFun

        ring = self.ring
        if isinstance(node, (Int, Name)):
            return _poly_value(node, ring)
        if isinstance(node, KLit):
            plus, minus = [], []
            for sign, e in node.items:
                u = _poly_value(e, ring)
                (plus if sign > 0 else minus).append(u)
            return KClass(ring, plus, minus)
        if isinstance(node, DeltaNode):
            arg = self.value(node.arg)
            arg = finalize(arg)
            if isinstance(arg, RatFun):
                arg = arg.as_polynomial()
            d = delta(arg)
            box = {v: (-self.order, self.order) for v in d.vars}
            return d.with_box(box)
        if isinstance(node, SeriesNode):
            K = self.value(node.klass)
            scale = LaurentPoly.constant(ring, 1)
            if node.scale is not None:
                s = finalize(self.value(node.scale))
                if isinstance(s, RatFun):
                    s = s.as_polynomial()
                if node.op == "/":
                    inv = s.unit_inverse()
                    if inv is None:
                        raise KhallError(f"scale {s} is not a unit monomial")
                    s = inv
                scale = s
            fn = wedge_series if node.kind == "wedge" else sym_series
            return _as_fact(fn(K, None, scale))
        if isinstance(node, AtNode):
            f = finalize(self.value(node.expr))
            if isinstance(f, (FormalDist, Series)) or not isinstance(f, (RatFun, LaurentPoly)):
                raise KhallError("at() expects a rational function")
            if node.direction == "both":
                return two_sided(f, node.var, self.order)
            return expand(f, node.var, node.direction, self.order)
        if isinstance(node, Neg):
            v = self.value(node.operand)
            if isinstance(v, _Fact):
                return _Fact(-v.coef, v.factors)
            return -v
        if isinstance(node, Pow):
            v = self.value(node.base)
            if isinstance(v, (LaurentPoly, RatFun, _Fact)):
                f = _as_fact(v)
                coef = f.coef ** node.exp
                return _Fact(coef, [(p, e * node.exp) for p, e in f.factors])
            raise KhallError(f"cannot raise {type(v).__name__} to a power")
        if isinstance(node, BinOp):
            a = self.value(node.left)
            b = self.value(node.right)
            return self.binop(node.op, a, b)
        raise TypeError(f"unknown node {node!r}")

    def binop(self, op, a, b):
        from .distcalc import FormalDist, Series, dist_mul
        from .kclass import KClass
        from .laurent import LaurentPoly, RatFun

        alg = (LaurentPoly, RatFun, _Fact)
        if isinstance(a, alg) and isinstance(b, alg):
            if op in "+-":
                if isinstance(a, LaurentPoly) and isinstance(b, LaurentPoly):
                    return a + b if op == "+" else a - b
                ra, rb = finalize(a), finalize(b)
                ra = RatFun(ra) if isinstance(ra, LaurentPoly) else ra
                rb = RatFun(rb) if isinstance(rb, LaurentPoly) else rb
                return (ra + rb if op == "+" else ra - rb).simplified()
            fa, fb = _as_fact(a), _as_fact(b)
            if op == "*":
                return _Fact(fa.coef * fb.coef, fa.factors + fb.factors)
            if fb.coef.is_zero():
                from .errors import DivisionByZero

                raise DivisionByZero("division by zero")
            return _Fact(fa.coef / fb.coef, fa.factors + [(p, -e) for p, e in fb.factors])
        if isinstance(a, KClass) and isinstance(b, KClass):
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            raise KhallError("classes cannot be divided")
        if isinstance(a, FormalDist) or isinstance(b, FormalDist):
            if op in "+-":
                if not (isinstance(a, FormalDist) and isinstance(b, FormalDist)):
                    raise KhallError("cannot add a distribution and a function")
                return a + b if op == "+" else a - b
            if op == "*":
                if isinstance(a, FormalDist):
                    other = b
                    dist = a
                else:
                    other, dist = a, b
                if isinstance(other, _Fact):
                    other = other.ratfun()
                return dist_mul(dist, other)
            raise KhallError("distributions cannot be divided")
        if isinstance(a, Series) or isinstance(b, Series):
            a = finalize(a)
            b = finalize(b)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            raise KhallError("series cannot be divided")
        raise KhallError(f"unsupported operands for {op}: {type(a).__name__}, {type(b).__name__}")


def finalize(v):
    from .laurent import RatFun

    if isinstance(v, _Fact):
        r = v.ratfun().simplified()
        if not r.den and r.const == 1:
            return r.num
        return r
    if isinstance(v, RatFun):
        r = v.simplified()
        if not r.den and r.const == 1:
            return r.num
        return r
    return v


def lower(node, ring: Ring, order: int = 8, auto_adjoin: bool = True):
    """Lower an AST to a kernel object; returns ``(value, ring)``."""
    low = Lowering(ring, order, auto_adjoin)
    val = low.run(node)
    return val, low.ring


def evaluate(text: str, ring: Ring | None = None, order: int = 8, auto_adjoin: bool = True):
    from .ring import preset

    return lower(parse(text), ring if ring is not None else preset("free"), order, auto_adjoin)
