"""Shared expression grammar for polynomials, polyvectors, and h-series.

Grammar (ASCII):

    expr    := ["+"|"-"] term (("+" | "-") term)*
    term    := factor ("*" factor)*
    factor  := base ("^" NAT)?
    base    := RAT | VAR | "(" expr ")" | wedge | "E" | "h"
    wedge   := "D(" NAT ("," NAT)* ")"
    RAT     := INT ("/" INT)?

Multiplication is always explicit (`*`), exponents are natural numbers.
`E` denotes the even generator eps, `D(i,...)` a wedge of odd generators,
and `h` the series parameter; the latter three are only accepted where the
calling context allows them.  Wedge indices must be distinct; a
non-increasing listing is normalized to increasing order with the sign of
the permutation folded into the coefficient.  A leading sign on the first
term is accepted so that formatted output always re-parses.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .poly import HSeries, Polynomial, RingContext
from .polyvector import GElement

_SYMBOLS = set("+-*^(),/")


class _Token:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind = kind
        self.value = value
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("NUM", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("NAME", text[i:j], i))
            i = j
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("EOF", None, n))
    return tokens


class _Parser:
    """Recursive descent into h-graded GElement values: dict h-power -> GElement."""

    def __init__(self, text: str, ctx: RingContext, allow_wedge: bool, allow_h: bool):
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_wedge = allow_wedge
        self.allow_h = allow_h

    # h-polynomial helpers ---------------------------------------------------

    def _zero(self):
        return {}

    def _const(self, q: Fraction):
        if q == 0:
            return {}
        return {0: GElement.from_polynomial(Polynomial.constant(self.ctx, q))}

    def _add(self, a, b):
        out = dict(a)
        for k, v in b.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return out

    def _neg(self, a):
        return {k: -v for k, v in a.items()}

    def _mul(self, a, b):
        out = {}
        for ka, va in a.items():
            for kb, vb in b.items():
                prod = va * vb
                if prod.is_zero():
                    continue
                k = ka + kb
                s = out.get(k)
                s = prod if s is None else s + prod
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return out

    def _pow(self, a, e: int):
        result = self._const(Fraction(1))
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    # token plumbing ---------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}", tok.pos)
        return self.advance()

    # grammar ----------------------------------------------------------------

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError("unexpected trailing input", tok.pos)
        return value

    def expr(self):
        sign = 1
        if self.peek().kind in ("+", "-"):
            if self.advance().kind == "-":
                sign = -1
        value = self.term()
        if sign < 0:
            value = self._neg(value)
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            value = self._add(value, rhs if op == "+" else self._neg(rhs))
        return value

    def term(self):
        value = self.factor()
        while self.peek().kind == "*":
            self.advance()
            value = self._mul(value, self.factor())
        return value

    def factor(self):
        value = self.base()
        if self.peek().kind == "^":
            self.advance()
            tok = self.expect("NUM", "exponent")
            value = self._pow(value, tok.value)
        return value

    def base(self):
        tok = self.peek()
        if tok.kind == "NUM":
            self.advance()
            num = tok.value
            if self.peek().kind == "/":
                self.advance()
                den_tok = self.expect("NUM", "denominator")
                if den_tok.value == 0:
                    raise ParseError("zero denominator", den_tok.pos)
                return self._const(Fraction(num, den_tok.value))
            return self._const(Fraction(num))
        if tok.kind == "(":
            self.advance()
            value = self.expr()
            self.expect(")", "')'")
            return value
        if tok.kind == "NAME":
            return self.name(self.advance())
        raise ParseError("expected a term", tok.pos)

    def name(self, tok: _Token):
        text = tok.value
        if text == "E":
            if not self.allow_wedge:
                raise ParseError("'E' is not allowed in this context", tok.pos)
            return {0: GElement.eps(self.ctx)}
        if text == "h":
            if not self.allow_h:
                raise ParseError("'h' is not allowed in this context", tok.pos)
            return {1: GElement.from_polynomial(Polynomial.one(self.ctx))}
        if text == "D":
            if not self.allow_wedge:
                raise ParseError("'D(...)' is not allowed in this context", tok.pos)
            return {0: self.wedge(tok)}
        try:
            i = self.ctx.index_of(text)
        except KeyError:
            raise ParseError(f"unknown variable {text!r}", tok.pos) from None
        return {0: GElement.from_polynomial(Polynomial.variable(self.ctx, i))}

    def wedge(self, d_tok: _Token) -> GElement:
        self.expect("(", "'(' after D")
        indices = []
        while True:
            tok = self.expect("NUM", "odd generator index")
            if not 1 <= tok.value <= self.ctx.n:
                raise ParseError(
                    f"index {tok.value} out of range 1..{self.ctx.n}", tok.pos
                )
            if tok.value in indices:
                raise ParseError(f"repeated index {tok.value}", tok.pos)
            indices.append(tok.value)
            nxt = self.peek()
            if nxt.kind == ",":
                self.advance()
                continue
            self.expect(")", "')' or ','")
            break
        acc = GElement.from_polynomial(Polynomial.one(self.ctx))
        for i in indices:
            acc = acc * GElement.gen(self.ctx, i)
        return acc


def _run(text: str, ctx: RingContext, allow_wedge: bool, allow_h: bool):
    return _Parser(text, ctx, allow_wedge, allow_h).parse()


def parse_polynomial(text: str, ctx: RingContext) -> Polynomial:
    """Parse a plain polynomial; E, D(...) and h are rejected."""
    value = _run(text, ctx, allow_wedge=False, allow_h=False)
    acc = Polynomial.zero(ctx)
    for _, g in value.items():
        acc = acc + g.polynomial_part()
    return acc


def parse_gelement(text: str, ctx: RingContext) -> GElement:
    """Parse a polyvector/graded element; h is rejected."""
    value = _run(text, ctx, allow_wedge=True, allow_h=False)
    acc = GElement.zero(ctx)
    for _, g in value.items():
        acc = acc + g
    return acc


def parse_series(text: str, ctx: RingContext, order: int = 8) -> HSeries:
    """Parse an h-series of graded elements, truncated at the given order."""
    value = _run(text, ctx, allow_wedge=True, allow_h=True)
    coeffs = [GElement.zero(ctx) for _ in range(order + 1)]
    for k, g in value.items():
        if k <= order:
            coeffs[k] = coeffs[k] + g
    return HSeries(coeffs, order)


def parse_poly_series(text: str, ctx: RingContext, order: int = 8) -> HSeries:
    """Parse an h-series of plain polynomials, truncated at the given order."""
    value = _run(text, ctx, allow_wedge=False, allow_h=True)
    coeffs = [Polynomial.zero(ctx) for _ in range(order + 1)]
    for k, g in value.items():
        if k <= order:
            coeffs[k] = coeffs[k] + g.polynomial_part()
    return HSeries(coeffs, order)


def format_polynomial(p: Polynomial) -> str:
    return str(p)


def format_gelement(x: GElement) -> str:
    return str(x)


def format_series(s: HSeries) -> str:
    parts = []
    for k, c in enumerate(s.coeffs):
        text = str(c)
        if text == "0":
            continue
        h = "" if k == 0 else ("h" if k == 1 else f"h^{k}")
        body = f"({text})" if (" " in text and h) else text
        parts.append(f"{body}*{h}" if h else body)
    return " + ".join(parts) if parts else "0"
