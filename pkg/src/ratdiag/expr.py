"""Algebraic-function expressions: parsing, normalisation, validation.

The grammar (whitespace-insensitive)::

    expr   := [ "-" ] term { ("+"|"-") term }
    term   := factor { ("*"|"/") factor }
    factor := base [ "^" "(" rational ")" | "^" integer ]
    base   := "(" expr ")" | variable | integer
    rational := integer [ "/" positive-integer ]

Variables are ``[a-z][a-z0-9_]*``; integers are signed, arbitrary precision.
The leading unary minus is a lenient extension; serialisation never emits it.

Parsed trees are normalised aggressively: any subtree built from constants
and polynomials with +, -, *, integer powers, or division by a constant is
folded into a single ``Poly`` node.  Division keeps a polynomial denominator;
a fractional power in a denominator becomes a negated-exponent ``PowRat``.
Negative integer exponents are rewritten as ``Div`` at parse time, so the
expansion code has a single code path per node kind.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import (
    DenominatorVanishesAtOrigin,
    ExprSyntaxError,
    MalformedExponentError,
    PowBaseConstantTermNotOne,
    UnknownVariableError,
)
from .poly import MPoly

AlgExpr = Union["Const", "Poly", "Add", "Mul", "Div", "PowRat"]


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Poly:
    poly: MPoly


@dataclass(frozen=True)
class Add:
    parts: tuple


@dataclass(frozen=True)
class Mul:
    parts: tuple


@dataclass(frozen=True)
class Div:
    num: AlgExpr
    den: AlgExpr


@dataclass(frozen=True)
class PowRat:
    base: AlgExpr
    exponent: Fraction


@dataclass(frozen=True)
class ValidatedExpr:
    """An expression whose expansion at the origin is guaranteed to exist.

    Every ``Div`` denominator has nonzero constant term and every fractional
    power has a base with constant term exactly 1.
    """

    expr: AlgExpr
    vars: tuple


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[a-z][a-z0-9_]*)|(?P<op>[-+*/^()]))"
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                stripped = text[pos:].lstrip()
                off = len(text) - len(stripped)
                raise ExprSyntaxError(f"unexpected character {text[off]!r}", off)
            if m.lastgroup:
                self.toks.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
            pos = m.end()
            if m.end() == m.start():  # trailing whitespace
                break
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, len(self.text))

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, off = self.next()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", off)


def parse_expr(text: str, variables: list[str] | tuple[str, ...]) -> AlgExpr:
    """Parse expression text over the declared (ordered) variables."""
    variables = tuple(variables)
    toks = _Tokens(text)
    tree = _parse_sum(toks, variables)
    kind, val, off = toks.peek()
    if kind is not None:
        raise ExprSyntaxError(f"trailing input {val!r}", off)
    return normalize(tree, variables)


def _parse_sum(toks: _Tokens, variables) -> AlgExpr:
    parts = []
    kind, val, _ = toks.peek()
    if kind == "op" and val == "-":
        toks.next()
        parts.append(Mul((Const(Fraction(-1)), _parse_term(toks, variables))))
    else:
        parts.append(_parse_term(toks, variables))
    while True:
        kind, val, _ = toks.peek()
        if kind == "op" and val in "+-":
            toks.next()
            term = _parse_term(toks, variables)
            if val == "-":
                term = Mul((Const(Fraction(-1)), term))
            parts.append(term)
        else:
            break
    return parts[0] if len(parts) == 1 else Add(tuple(parts))


def _parse_term(toks: _Tokens, variables) -> AlgExpr:
    result = _parse_factor(toks, variables)
    while True:
        kind, val, _ = toks.peek()
        if kind == "op" and val in "*/":
            toks.next()
            rhs = _parse_factor(toks, variables)
            result = Mul((result, rhs)) if val == "*" else Div(result, rhs)
        else:
            break
    return result


def _parse_factor(toks: _Tokens, variables) -> AlgExpr:
    base = _parse_base(toks, variables)
    kind, val, _ = toks.peek()
    if kind == "op" and val == "^":
        toks.next()
        exp = _parse_exponent(toks)
        if exp.denominator == 1 and exp < 0:
            return Div(Const(Fraction(1)), PowRat(base, -exp))
        return PowRat(base, exp)
    return base


def _parse_exponent(toks: _Tokens) -> Fraction:
    kind, val, off = toks.peek()
    if kind == "op" and val == "(":
        toks.next()
        num = _parse_signed_int(toks)
        kind, val, off = toks.peek()
        den = 1
        if kind == "op" and val == "/":
            toks.next()
            kind, val, off = toks.next()
            if kind != "int":
                raise MalformedExponentError("expected positive integer denominator", off)
            den = int(val)
            if den <= 0:
                raise MalformedExponentError("exponent denominator must be positive", off)
        toks.expect_op(")")
        return Fraction(num, den)
    if kind == "op" and val == "-" or kind == "int":
        return Fraction(_parse_signed_int(toks))
    raise MalformedExponentError("expected integer or parenthesised rational exponent", off)


def _parse_signed_int(toks: _Tokens) -> int:
    kind, val, off = toks.next()
    sign = 1
    if kind == "op" and val == "-":
        sign = -1
        kind, val, off = toks.next()
    if kind != "int":
        raise ExprSyntaxError("expected integer", off)
    return sign * int(val)


def _parse_base(toks: _Tokens, variables) -> AlgExpr:
    kind, val, off = toks.next()
    if kind == "op" and val == "(":
        inner = _parse_sum(toks, variables)
        toks.expect_op(")")
        return inner
    if kind == "name":
        if val not in variables:
            raise UnknownVariableError(val, off)
        return Poly(MPoly.variable(variables, val))
    if kind == "int":
        n = int(val)
        k2, v2, _ = toks.peek()
        # "p/q" with integer p, q is handled by term-level division; a plain
        # integer is a constant.
        return Const(Fraction(n))
    if kind == "op" and val == "-":
        k2, v2, off2 = toks.next()
        if k2 != "int":
            raise ExprSyntaxError("expected integer after unary '-'", off2)
        return Const(Fraction(-int(v2)))
    raise ExprSyntaxError("expected '(', variable, or integer", off)


# -- normalisation ----------------------------------------------------------


def normalize(expr: AlgExpr, variables: tuple) -> AlgExpr:
    """Fold polynomial subtrees and push denominators into canonical places."""
    expr = _norm(expr, variables)
    return expr


def _poly_of(expr: AlgExpr, variables: tuple) -> MPoly | None:
    """Return the expression as an MPoly when it is polynomial, else None."""
    if isinstance(expr, Const):
        return MPoly.const(variables, expr.value)
    if isinstance(expr, Poly):
        return expr.poly.with_vars(variables)
    return None


def _norm(expr: AlgExpr, variables: tuple) -> AlgExpr:
    if isinstance(expr, (Const, Poly)):
        return expr
    if isinstance(expr, Add):
        parts = []
        for p in expr.parts:
            p = _norm(p, variables)
            if isinstance(p, Add):
                parts.extend(p.parts)
            else:
                parts.append(p)
        poly_acc = None
        rest = []
        for p in parts:
            as_poly = _poly_of(p, variables)
            if as_poly is not None:
                poly_acc = as_poly if poly_acc is None else poly_acc + as_poly
            else:
                rest.append(p)
        if poly_acc is not None and not rest:
            return _poly_node(poly_acc)
        if poly_acc is not None:
            rest.append(_poly_node(poly_acc))
        return rest[0] if len(rest) == 1 else Add(tuple(rest))
    if isinstance(expr, Mul):
        num_factors, den_factors = _collect_mul(expr, variables)
        return _rebuild_fraction(num_factors, den_factors, variables)
    if isinstance(expr, Div):
        num_factors, den_factors = _collect_mul(expr, variables)
        return _rebuild_fraction(num_factors, den_factors, variables)
    if isinstance(expr, PowRat):
        base = _norm(expr.base, variables)
        exp = Fraction(expr.exponent)
        if isinstance(base, PowRat):
            return _norm(PowRat(base.base, base.exponent * exp), variables)
        if exp == 1:
            return base
        if exp.denominator == 1:
            n = int(exp)
            if n < 0:
                return _norm(Div(Const(Fraction(1)), PowRat(base, -exp)), variables)
            bp = _poly_of(base, variables)
            if bp is not None:
                return _poly_node(bp ** n)
            if n == 0:
                return Const(Fraction(1))
        return PowRat(base, exp)
    raise TypeError(f"not an AlgExpr node: {expr!r}")


def _poly_node(p: MPoly) -> AlgExpr:
    if not p.terms or set(p.terms) == {(0,) * len(p.vars)}:
        return Const(p.constant_term)
    return Poly(p)


def _collect_mul(expr: AlgExpr, variables: tuple, into_den=False, num=None, den=None):
    """Flatten a multiplicative tree into numerator/denominator factor lists."""
    if num is None:
        num, den = [], []
    target = den if into_den else num
    if isinstance(expr, Mul):
        for p in expr.parts:
            _collect_mul(p, variables, into_den, num, den)
    elif isinstance(expr, Div):
        _collect_mul(expr.num, variables, into_den, num, den)
        _collect_mul(expr.den, variables, not into_den, num, den)
    else:
        target.append(_norm(expr, variables))
    return num, den


def _rebuild_fraction(num_factors, den_factors, variables) -> AlgExpr:
    # fractional powers in the denominator become negated exponents on top
    kept_den = []
    for f in den_factors:
        if isinstance(f, PowRat) and f.exponent.denominator != 1:
            num_factors.append(PowRat(f.base, -f.exponent))
        else:
            kept_den.append(f)

    def fold(factors):
        poly_acc = None
        rest = []
        for f in factors:
            p = _poly_of(f, variables)
            if p is not None:
                poly_acc = p if poly_acc is None else poly_acc * p
            else:
                rest.append(f)
        return poly_acc, rest

    num_poly, num_rest = fold(num_factors)
    den_poly, den_rest = fold(kept_den)

    if den_rest:
        # non-polynomial denominator that is not a fractional power: keep a
        # nested Div; expansion handles it by inversion.
        den_expr_parts = den_rest + ([_poly_node(den_poly)] if den_poly is not None else [])
        den_expr = den_expr_parts[0] if len(den_expr_parts) == 1 else Mul(tuple(den_expr_parts))
        num_expr = _rebuild_fraction(num_factors, [], variables)
        return Div(num_expr, den_expr)

    parts = []
    if num_poly is not None:
        node = _poly_node(num_poly)
        if not (isinstance(node, Const) and node.value == 1 and num_rest):
            parts.append(node)
    parts.extend(num_rest)
    if not parts:
        parts = [Const(Fraction(1))]
    num_expr = parts[0] if len(parts) == 1 else Mul(tuple(parts))
    if den_poly is None:
        return num_expr
    if not den_poly:
        raise DenominatorVanishesAtOrigin("division by the zero polynomial")
    den_node = _poly_node(den_poly)
    if isinstance(den_node, Const):
        return _scale(num_expr, Fraction(1) / den_node.value, variables)
    return Div(num_expr, den_node)


def _scale(expr: AlgExpr, c: Fraction, variables) -> AlgExpr:
    if c == 1:
        return expr
    if isinstance(expr, Const):
        return Const(expr.value * c)
    if isinstance(expr, Poly):
        return _poly_node(expr.poly * c)
    if isinstance(expr, Mul):
        return _norm(Mul((Const(c),) + expr.parts), variables)
    return Mul((Const(c), expr))


# -- inspection -------------------------------------------------------------


def expr_vars(expr: AlgExpr) -> tuple:
    """Ordered variable tuple actually referenced by the expression."""
    seen: list[str] = []

    def walk(e):
        if isinstance(e, Poly):
            for i, v in enumerate(e.poly.vars):
                if v not in seen and any(t[i] for t in e.poly.terms):
                    seen.append(v)
        elif isinstance(e, Add) or isinstance(e, Mul):
            for p in e.parts:
                walk(p)
        elif isinstance(e, Div):
            walk(e.num)
            walk(e.den)
        elif isinstance(e, PowRat):
            walk(e.base)

    walk(expr)
    return tuple(seen)


def constant_term(expr: AlgExpr) -> Fraction:
    """Value of the expression at the origin; raises if undefined."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Poly):
        return expr.poly.constant_term
    if isinstance(expr, Add):
        return sum((constant_term(p) for p in expr.parts), Fraction(0))
    if isinstance(expr, Mul):
        out = Fraction(1)
        for p in expr.parts:
            out *= constant_term(p)
        return out
    if isinstance(expr, Div):
        d = constant_term(expr.den)
        if d == 0:
            raise DenominatorVanishesAtOrigin(
                f"denominator {serialize(expr.den)!r} vanishes at the origin"
            )
        return constant_term(expr.num) / d
    if isinstance(expr, PowRat):
        b = constant_term(expr.base)
        e = expr.exponent
        if e.denominator == 1:
            return b ** int(e)
        if b != 1:
            raise PowBaseConstantTermNotOne(
                f"base of ^({e}) has constant term {b}, expected 1"
            )
        return Fraction(1)
    raise TypeError(f"not an AlgExpr node: {expr!r}")


def validate(expr: AlgExpr, variables=None) -> ValidatedExpr:
    """Check expandability at the origin and return the proof-carrying wrapper."""

    def walk(e):
        if isinstance(e, (Const, Poly)):
            return
        if isinstance(e, (Add, Mul)):
            for p in e.parts:
                walk(p)
            return
        if isinstance(e, Div):
            walk(e.num)
            walk(e.den)
            d = constant_term(e.den)
            if d == 0:
                raise DenominatorVanishesAtOrigin(
                    f"denominator {serialize(e.den)!r} vanishes at the origin"
                )
            return
        if isinstance(e, PowRat):
            walk(e.base)
            constant_term(e)  # raises PowBaseConstantTermNotOne when violated
            return
        raise TypeError(f"not an AlgExpr node: {e!r}")

    walk(expr)
    if variables is None:
        variables = expr_vars(expr)
    return ValidatedExpr(expr, tuple(variables))


def substitute(expr: AlgExpr, bindings: Mapping[str, AlgExpr]) -> AlgExpr:
    """Simultaneous substitution; polynomial nodes are re-normalised."""
    all_vars = list(expr_vars(expr))
    for v, b in bindings.items():
        for w in expr_vars(b):
            if w not in all_vars:
                all_vars.append(w)
    all_vars = tuple(all_vars)

    poly_bindings = {}
    general = False
    for v, b in bindings.items():
        p = _poly_of(_norm(b, all_vars), all_vars)
        if p is None:
            general = True
        else:
            poly_bindings[v] = p

    def walk(e):
        if isinstance(e, Const):
            return e
        if isinstance(e, Poly):
            if not general:
                needed = {v: poly_bindings[v] for v in e.poly.vars if v in poly_bindings}
                return _poly_node(e.poly.subs(needed)) if needed else e
            parts = []
            for exp, c in sorted(e.poly.terms.items()):
                factors = [Const(c)]
                for name, k in zip(e.poly.vars, exp):
                    if k:
                        rep = bindings.get(name, Poly(MPoly.variable(all_vars, name)))
                        for _ in range(k):
                            factors.append(rep)
                parts.append(Mul(tuple(factors)))
            return Add(tuple(parts)) if len(parts) != 1 else parts[0]
        if isinstance(e, Add):
            return Add(tuple(walk(p) for p in e.parts))
        if isinstance(e, Mul):
            return Mul(tuple(walk(p) for p in e.parts))
        if isinstance(e, Div):
            return Div(walk(e.num), walk(e.den))
        if isinstance(e, PowRat):
            return PowRat(walk(e.base), e.exponent)
        raise TypeError(f"not an AlgExpr node: {e!r}")

    return normalize(walk(expr), all_vars)


# -- serialisation ----------------------------------------------------------


def serialize(expr: AlgExpr) -> str:
    """Render to grammar-conforming text; parse(serialize(e)) == e."""
    return _ser(expr, prec=0)


def _ser(expr: AlgExpr, prec: int) -> str:
    # precedence levels: 0 sum, 1 product, 2 power operand
    if isinstance(expr, Const):
        v = expr.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        needs = prec >= 1 and (v.denominator != 1 or v < 0)
        return f"({s})" if needs else s
    if isinstance(expr, Poly):
        s = expr.poly.serialize()
        simple = len(expr.poly.terms) == 1 and all(
            c == 1 for c in expr.poly.terms.values()
        )
        return s if (prec == 0 or simple and "*" not in s and "^" not in s or prec == 1 and "+" not in s and "- " not in s) else f"({s})"
    if isinstance(expr, Add):
        s = " + ".join(_ser(p, 0) for p in expr.parts).replace("+ -1*", "- ")
        return f"({s})" if prec >= 1 else s
    if isinstance(expr, Mul):
        s = "*".join(_ser(p, 1) for p in expr.parts)
        return f"({s})" if prec >= 2 else s
    if isinstance(expr, Div):
        s = f"{_ser(expr.num, 1)}/{_ser(expr.den, 2)}"
        return f"({s})" if prec >= 2 else s
    if isinstance(expr, PowRat):
        e = expr.exponent
        es = str(e.numerator) if e.denominator == 1 and e >= 0 else f"({e.numerator}/{e.denominator})" if e.denominator != 1 else f"({e.numerator})"
        return f"{_ser(expr.base, 2)}^{es}"
    raise TypeError(f"not an AlgExpr node: {expr!r}")
