"""Sparse multivariate polynomials over exact rationals.

``MPoly`` is the shared polynomial type: an ordered tuple of variable names
plus a map from exponent tuples to nonzero ``Fraction`` coefficients.
Variable order is significant (it is declaration order everywhere in the
library) and is preserved by every operation; binary operations between
polynomials with different variable tuples first align both operands to the
merged tuple (left order, then unseen right variables appended).

Everything here is immutable by convention: methods return new instances.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import DivisionNotExact

Scalar = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class MPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[tuple, Scalar] | None = None):
        self.vars = tuple(variables)
        n = len(self.vars)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} has wrong length for vars {self.vars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = _as_fraction(c)
            if c:
                clean[exp] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, variables: Iterable[str]) -> "MPoly":
        return cls(variables, {})

    @classmethod
    def const(cls, variables: Iterable[str], c: Scalar) -> "MPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): _as_fraction(c)})

    @classmethod
    def variable(cls, variables: Iterable[str], name: str) -> "MPoly":
        variables = tuple(variables)
        i = variables.index(name)
        exp = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, {exp: Fraction(1)})

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "MPoly":
        p = object.__new__(cls)
        p.vars = variables
        p.terms = terms
        return p

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return 0
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            return NotImplemented
        if self.vars == other.vars:
            return self.terms == other.terms
        a, b = align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MPoly({self.serialize()!r})"

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "MPoly":
        return MPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.vars, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = align(self, other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly._raw(a.vars, out)

    __radd__ = __add__

    def __sub__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.vars, other)
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        return (-self) + other

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if not c:
                return MPoly.zero(self.vars)
            return MPoly._raw(self.vars, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = align(self, other)
        if len(a.terms) < len(b.terms):
            a, b = b, a
        out: dict[tuple, Fraction] = {}
        for eb, cb in b.terms.items():
            for ea, ca in a.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, Fraction(0)) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MPoly._raw(a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = MPoly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def partial(self, name: str) -> "MPoly":
        """Partial derivative with respect to one variable."""
        i = self.vars.index(name)
        out: dict[tuple, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = c * e[i]
        return MPoly._raw(self.vars, out)

    # -- structural transforms ----------------------------------------------

    def with_vars(self, variables: Iterable[str]) -> "MPoly":
        """Re-embed into a different variable tuple (must contain all used vars)."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        pos = []
        for i, v in enumerate(self.vars):
            if v in variables:
                pos.append(variables.index(v))
            else:
                if any(e[i] for e in self.terms):
                    raise ValueError(f"variable {v!r} is used but absent from {variables}")
                pos.append(None)
        n = len(variables)
        out: dict[tuple, Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, p in enumerate(pos):
                if p is not None:
                    ne[p] = e[i]
            out[tuple(ne)] = c
        return MPoly._raw(variables, out)

    def rename(self, mapping: Mapping[str, str]) -> "MPoly":
        return MPoly._raw(tuple(mapping.get(v, v) for v in self.vars), dict(self.terms))

    def subs(self, bindings: Mapping[str, "MPoly"]) -> "MPoly":
        """Simultaneous polynomial substitution.

        Unbound variables are kept.  The result lives in the merged variable
        tuple of self and every binding value.
        """
        out_vars = list(self.vars)
        for val in bindings.values():
            for v in val.vars:
                if v not in out_vars:
                    out_vars.append(v)
        out_vars = tuple(out_vars)
        result = MPoly.zero(out_vars)
        # cache powers of each substituted value
        powers: dict[str, list[MPoly]] = {}
        for name, val in bindings.items():
            powers[name] = [MPoly.const(out_vars, 1), val.with_vars(out_vars)]
        for e, c in self.terms.items():
            term = MPoly.const(out_vars, c)
            for i, v in enumerate(self.vars):
                if e[i] == 0:
                    continue
                if v in bindings:
                    plist = powers[v]
                    while len(plist) <= e[i]:
                        plist.append(plist[-1] * plist[1])
                    term = term * plist[e[i]]
                else:
                    j = out_vars.index(v)
                    shifted = {}
                    for te, tc in term.terms.items():
                        ne = list(te)
                        ne[j] += e[i]
                        shifted[tuple(ne)] = tc
                    term = MPoly._raw(out_vars, shifted)
            result = result + term
        return result

    def drop_var(self, name: str) -> "MPoly":
        """Remove an unused variable from the tuple."""
        i = self.vars.index(name)
        if any(e[i] for e in self.terms):
            raise ValueError(f"variable {name!r} is still used")
        nv = self.vars[:i] + self.vars[i + 1:]
        return MPoly._raw(nv, {e[:i] + e[i + 1:]: c for e, c in self.terms.items()})

    # -- exact divisions used by the doubling construction -------------------

    def div_var_exact(self, name: str) -> "MPoly":
        """Divide by a single variable; every term must contain it."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                raise DivisionNotExact(f"term {e} has no factor {name}")
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = c
        return MPoly._raw(self.vars, out)

    def div_diff_exact(self, u: str, v: str) -> "MPoly":
        """Exact quotient by (u - v), via synthetic division in u.

        Raises DivisionNotExact when (u - v) does not divide self, which
        signals an upstream bug in the doubling chain.
        """
        iu = self.vars.index(u)
        iv = self.vars.index(v)
        # group terms by u-exponent: self = sum_j p_j * u^j
        by_udeg: dict[int, dict[tuple, Fraction]] = {}
        for e, c in self.terms.items():
            rest = list(e)
            j = rest[iu]
            rest[iu] = 0
            by_udeg.setdefault(j, {})[tuple(rest)] = c
        if not by_udeg:
            return MPoly.zero(self.vars)
        dmax = max(by_udeg)
        # quotient Q_j = p_{j+1} + v * Q_{j+1}, descending; remainder must vanish
        quot: dict[tuple, Fraction] = {}
        carry: dict[tuple, Fraction] = {}  # current Q_j as poly in remaining vars
        for j in range(dmax - 1, -2, -1):
            # carry currently holds Q_{j+1}; multiply by v and add p_{j+1}
            shifted: dict[tuple, Fraction] = {}
            for e, c in carry.items():
                ne = list(e)
                ne[iv] += 1
                shifted[tuple(ne)] = c
            for e, c in by_udeg.get(j + 1, {}).items():
                s = shifted.get(e, Fraction(0)) + c
                if s:
                    shifted[e] = s
                else:
                    shifted.pop(e, None)
            carry = shifted
            if j >= 0:
                for e, c in carry.items():
                    ne = list(e)
                    ne[iu] += j
                    quot[tuple(ne)] = c
        # after the loop carry holds p_0 + v*Q_0, the negated remainder test:
        # remainder = self(u=v) which equals carry here; it must be zero
        if carry:
            raise DivisionNotExact(f"({u} - {v}) does not divide polynomial")
        return MPoly._raw(self.vars, quot)

    # -- text form -----------------------------------------------------------

    def serialize(self) -> str:
        """Grammar-conforming text (sums of monomials with ^ powers)."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            factors = []
            if c.denominator == 1:
                if c.numerator != 1 or not any(e):
                    factors.append(str(c.numerator))
            else:
                factors.append(f"{c.numerator}/{c.denominator}")
            for name, k in zip(self.vars, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            parts.append("*".join(factors))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def align(a: MPoly, b: MPoly) -> tuple[MPoly, MPoly]:
    """Bring two polynomials onto the merged variable tuple."""
    if a.vars == b.vars:
        return a, b
    merged = list(a.vars)
    for v in b.vars:
        if v not in merged:
            merged.append(v)
    merged = tuple(merged)
    return a.with_vars(merged), b.with_vars(merged)
