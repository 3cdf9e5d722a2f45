"""Exact multivariate polynomial arithmetic over arbitrary-precision rationals.

A polynomial is a map from exponent tuples (one non-negative integer per
variable) to ``fractions.Fraction`` coefficients.  Zero coefficients are never
stored, so the zero polynomial is the unique polynomial with an empty term map
and equality is plain comparison of the term maps.

Parameters such as ``A`` or series constants such as ``alpha`` are ordinary
ring variables; whether a variable is "phase" or "parameter" is a usage
convention of the caller, not a type distinction.

The monomial order used throughout (term printing, leading terms, single
divisor reduction) is graded lexicographic with respect to the declared
variable order.
"""

from __future__ import annotations

import ast
import operator
from fractions import Fraction
from typing import Iterable, Mapping

Rational = Fraction

__all__ = [
    "Rational",
    "Polynomial",
    "variables",
    "poly_from_terms",
    "grlex_key",
    "reduce_mod",
    "parse_polynomial",
]


def variables(names: str | Iterable[str]) -> tuple[str, ...]:
    """Build a variable set (ordered tuple of distinct names) from a spec
    like ``"y1 y2 x1 x2 A"`` or an iterable of names."""
    if isinstance(names, str):
        names = names.split()
    out = tuple(names)
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate variable names in {out}")
    return out


def grlex_key(exponents: tuple[int, ...]) -> tuple:
    """Sort key realizing graded lexicographic order (larger key = larger
    monomial)."""
    return (sum(exponents), exponents)


class Polynomial:
    """Immutable exact polynomial over Q in a fixed ordered variable set."""

    __slots__ = ("vars", "_terms")

    def __init__(self, vars: tuple[str, ...], terms: Mapping[tuple[int, ...], Fraction | int]):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exp, c in terms.items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError(f"exponent vector {exp} does not match {n} variables")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = Fraction(c)
            if c != 0:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        self._terms = {e: c for e, c in clean.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, vars: tuple[str, ...]) -> "Polynomial":
        return cls(vars, {})

    @classmethod
    def constant(cls, vars: tuple[str, ...], c) -> "Polynomial":
        return cls(vars, {(0,) * len(vars): Fraction(c)})

    @classmethod
    def variable(cls, vars: tuple[str, ...], name: str) -> "Polynomial":
        if name not in vars:
            raise ValueError(f"unknown variable {name!r} (have {vars})")
        exp = [0] * len(vars)
        exp[vars.index(name)] = 1
        return cls(vars, {tuple(exp): Fraction(1)})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exp) for exp in self._terms)

    def constant_value(self) -> Fraction:
        """The coefficient of the constant monomial."""
        return self._terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, name: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        i = self.vars.index(name)
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def coefficient_of(self, name: str, power: int) -> "Polynomial":
        """The polynomial coefficient of name**power (name eliminated to
        exponent zero in the result, same ring)."""
        i = self.vars.index(name)
        out = {}
        for exp, c in self._terms.items():
            if exp[i] == power:
                e = list(exp)
                e[i] = 0
                out[tuple(e)] = c
        return Polynomial(self.vars, out)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading (monomial, coefficient) in graded lex order."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self._terms, key=grlex_key)
        return exp, self._terms[exp]

    def content(self) -> Fraction:
        """gcd of the absolute coefficient values (0 for the zero poly)."""
        num = 0
        den = 1
        for c in self._terms.values():
            from math import gcd

            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def primitive(self) -> "Polynomial":
        """Divide out the content and fix the sign so the grlex-leading
        coefficient is positive.  Zero stays zero."""
        if not self._terms:
            return self
        c = self.content()
        _, lead = self.leading()
        if lead < 0:
            c = -c
        return self * Fraction(1, 1) / c

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable sets differ: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Polynomial.constant(self.vars, other)
        self._check(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return Polynomial(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Polynomial.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            c = Fraction(other)
            return Polynomial(self.vars, {e: k * c for e, k in self._terms.items()})
        self._check(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # scalar division only; polynomial division lives in reduce_mod
        c = Fraction(other)
        if c == 0:
            raise ZeroDivisionError("division of polynomial by zero scalar")
        return self * Fraction(1, 1) * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"polynomial power must be a non-negative integer, got {k}")
        result = Polynomial.constant(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.vars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self._terms.items())))

    # -- calculus / substitution ------------------------------------------

    def diff(self, name: str) -> "Polynomial":
        """Exact formal partial derivative with respect to one variable."""
        if name not in self.vars:
            raise ValueError(f"unknown variable {name!r}")
        i = self.vars.index(name)
        out = {}
        for exp, c in self._terms.items():
            if exp[i] == 0:
                continue
            e = list(exp)
            e[i] -= 1
            out[tuple(e)] = out.get(tuple(e), Fraction(0)) + c * exp[i]
        return Polynomial(self.vars, out)

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate at a point.  Values may be Fraction/int (exact), float or
        complex; the result type follows the inputs.  Every variable must be
        assigned."""
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise ValueError(f"missing assignment for {missing}")
        vals = [assignment[v] for v in self.vars]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for v, e in zip(vals, exp):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Ring homomorphism sending every variable to the given image
        polynomial.  All images must share one common variable set."""
        missing = [v for v in self.vars if v not in images]
        if missing:
            raise ValueError(f"missing image for {missing}")
        target = None
        for img in images.values():
            if target is None:
                target = img.vars
            elif img.vars != target:
                raise ValueError("substitution images do not share a variable set")
        assert target is not None
        result = Polynomial.zero(target)
        # cache powers of each image
        powers: dict[str, list[Polynomial]] = {}

        def power(v: str, e: int) -> Polynomial:
            cache = powers.setdefault(v, [Polynomial.constant(target, 1)])
            while len(cache) <= e:
                cache.append(cache[-1] * images[v])
            return cache[e]

        for exp, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for v, e in zip(self.vars, exp):
                if e:
                    term = term * power(v, e)
            result = result + term
        return result

    def rename(self, vars: tuple[str, ...], mapping: Mapping[str, str] | None = None) -> "Polynomial":
        """Re-express this polynomial in another variable set.  Every variable
        actually occurring must map (via `mapping`, default identity) to a
        variable of the new set."""
        mapping = dict(mapping or {})
        idx = []
        for i, v in enumerate(self.vars):
            name = mapping.get(v, v)
            if name in vars:
                idx.append(vars.index(name))
            else:
                idx.append(None)
        out = {}
        for exp, c in self._terms.items():
            e = [0] * len(vars)
            for i, p in enumerate(exp):
                if p == 0:
                    continue
                if idx[i] is None:
                    raise ValueError(f"variable {self.vars[i]!r} has no image in {vars}")
                e[idx[i]] += p
            out[tuple(e)] = out.get(tuple(e), Fraction(0)) + c
        return Polynomial(vars, out)

    # -- printing ----------------------------------------------------------

    def to_text(self) -> str:
        """Deterministic text form: terms in descending graded lex order,
        each as ``c * v1^e1*v2^e2`` with rationals printed as ``p/q``."""
        if not self._terms:
            return "0"
        parts = []
        for exp in sorted(self._terms, key=grlex_key, reverse=True):
            c = self._terms[exp]
            mono = "*".join(f"{v}^{e}" for v, e in zip(self.vars, exp) if e)
            if mono:
                parts.append(f"{c} * {mono}")
            else:
                parts.append(f"{c}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"


def poly_from_terms(vars: tuple[str, ...], *terms) -> Polynomial:
    """Convenience builder: each term is (coefficient, {var: exponent})."""
    out: dict[tuple[int, ...], Fraction] = {}
    for c, mono in terms:
        exp = [0] * len(vars)
        for v, e in mono.items():
            exp[vars.index(v)] = e
        key = tuple(exp)
        out[key] = out.get(key, Fraction(0)) + Fraction(c)
    return Polynomial(vars, out)


def reduce_mod(p: Polynomial, g: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Single-divisor division in graded lex order.

    Returns (quotient, remainder) with p = quotient*g + remainder exactly and
    no monomial of the remainder divisible by the leading monomial of g.  For
    a principal ideal this decides membership: remainder == 0 iff p is a
    polynomial multiple of g.
    """
    if p.vars != g.vars:
        raise ValueError("reduce_mod requires a common variable set")
    if g.is_zero():
        raise ZeroDivisionError("reduction modulo the zero polynomial")
    lead_exp, lead_c = g.leading()
    quotient = Polynomial.zero(p.vars)
    remainder_terms: dict[tuple[int, ...], Fraction] = {}
    work = p
    while not work.is_zero():
        exp, c = work.leading()
        if all(a >= b for a, b in zip(exp, lead_exp)):
            q_exp = tuple(a - b for a, b in zip(exp, lead_exp))
            q_term = Polynomial(p.vars, {q_exp: c / lead_c})
            quotient = quotient + q_term
            work = work - q_term * g
        else:
            remainder_terms[exp] = remainder_terms.get(exp, Fraction(0)) + c
            work = work - Polynomial(p.vars, {exp: c})
    return quotient, Polynomial(p.vars, remainder_terms)


def exact_divide(p: Polynomial, g: Polynomial) -> Polynomial:
    """p / g when the division is exact; raises ValueError otherwise."""
    q, r = reduce_mod(p, g)
    if not r.is_zero():
        raise ValueError("division is not exact")
    return q


# -- parsing ---------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


def parse_polynomial(text: str, vars: tuple[str, ...]) -> Polynomial:
    """Parse a polynomial expression over the given variables.

    Accepts +, -, *, parentheses, ** or ^ for powers, integer and rational
    (p/q) coefficients, e.g. ``"3*x1^4 - 2/3*y1^6"``.
    """
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int):
                return Polynomial.constant(vars, node.value)
            raise ValueError(f"unsupported literal {node.value!r}")
        if isinstance(node, ast.Name):
            return Polynomial.variable(vars, node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -walk(node.operand)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return walk(node.operand)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = walk(node.left)
                if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                    raise ValueError("exponent must be a literal integer")
                return base ** node.right.value
            if isinstance(node.op, ast.Div):
                num = walk(node.left)
                den = walk(node.right)
                if not den.is_constant():
                    raise ValueError("division only by rational constants")
                return num / den.constant_value()
            op = _BINOPS.get(type(node.op))
            if op is None:
                raise ValueError(f"unsupported operator {ast.dump(node.op)}")
            return op(walk(node.left), walk(node.right))
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    return walk(tree)
