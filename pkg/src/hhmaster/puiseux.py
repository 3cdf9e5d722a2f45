"""Formal series solutions in fractional powers of t.

Pipeline: search for leading-order balances of a polynomial field, locate the
resonant orders where free parameters enter (Kowalewski exponents), expand the
series recursively with exact polynomial coefficients in the parameter ring,
restrict the invariants to the series to obtain the residue relations, and
eliminate the last free parameter to derive the blow-up curve.

Exponents are kept as integers equal to twice the actual exponent, so all
half-integer bookkeeping is exact.  Series coefficients are Polynomials in the
parameter ring (system parameters followed by the free-constant names), or
PolyFrac rational functions when a recursion step genuinely divides by a
leading free constant.

The recursive expansion is the authority; the series and curve printed in the
source material are stored only as comparison targets, since such displays
commonly carry typos.  Comparison mismatches are report content, never
silent corrections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .exactpoly import Polynomial, exact_divide, parse_polynomial, reduce_mod, variables
from .hamsys import VectorField

__all__ = [
    "PuiseuxSeries",
    "Balance",
    "ResonanceReport",
    "ExpansionResult",
    "CurveRelation",
    "ExpansionError",
    "RestrictionError",
    "EliminationError",
    "PolyFrac",
    "find_balances",
    "kowalewski_exponents",
    "expand_solution",
    "principal_expansion",
    "invariant_restriction",
    "eliminate_and_compare_curve",
    "substitute_series",
    "ode_residual",
    "printed_series_case3",
    "compare_with_printed",
    "printed_residue_relations",
    "printed_curve",
    "CURVE_RING",
    "DEFAULT_FREE_NAMES",
]

DEFAULT_FREE_NAMES = ("alpha", "beta", "gamma", "delta", "mu")

# Truncation sentinel: "exact to all orders" (constants, exact zero).
INF2 = 10**9


class ExpansionError(ValueError):
    """Inconsistent linear step during series expansion."""


class RestrictionError(ValueError):
    """An invariant restricted to the series has a non-constant term."""


class EliminationError(ValueError):
    """The residue relation cannot be solved linearly for the parameter."""


# -------------------------------------------------------------------------
# Series carrier
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class PuiseuxSeries:
    """Truncated series sum_e coeff[e] * t^(e/2) with polynomial coefficients.

    ``coeffs`` maps twice-the-exponent integers to nonzero Polynomials in the
    parameter ring; coefficients with key <= trunc2 are exact, everything
    beyond is unknown.
    """

    ring: tuple[str, ...]
    coeffs: dict[int, Polynomial]
    trunc2: int

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {e: c for e, c in self.coeffs.items() if not c.is_zero() and e <= self.trunc2}
        )

    @classmethod
    def zero(cls, ring) -> "PuiseuxSeries":
        return cls(ring, {}, INF2)

    @classmethod
    def constant(cls, ring, p: Polynomial) -> "PuiseuxSeries":
        return cls(ring, {0: p}, INF2)

    def offset2(self) -> int:
        """Twice the lowest exponent; INF2 for the (known-)zero series."""
        return min(self.coeffs) if self.coeffs else INF2

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, e2: int) -> Polynomial:
        if e2 > self.trunc2:
            raise ValueError(f"exponent {Fraction(e2, 2)} beyond truncation {Fraction(self.trunc2, 2)}")
        return self.coeffs.get(e2, Polynomial.zero(self.ring))

    def with_term(self, e2: int, c: Polynomial) -> "PuiseuxSeries":
        out = dict(self.coeffs)
        out[e2] = out.get(e2, Polynomial.zero(self.ring)) + c
        return PuiseuxSeries(self.ring, out, self.trunc2)

    def truncated(self, trunc2: int) -> "PuiseuxSeries":
        return PuiseuxSeries(self.ring, self.coeffs, min(self.trunc2, trunc2))

    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Polynomial.zero(self.ring)) + c
        return PuiseuxSeries(self.ring, out, min(self.trunc2, other.trunc2))

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(self.ring, {e: -c for e, c in self.coeffs.items()}, self.trunc2)

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return self + (-other)

    def __mul__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        if self.is_zero() or other.is_zero():
            return PuiseuxSeries.zero(self.ring)
        trunc2 = min(
            self.offset2() + other.trunc2,
            self.trunc2 + other.offset2(),
        )
        out: dict[int, Polynomial] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e > trunc2:
                    continue
                out[e] = out.get(e, Polynomial.zero(self.ring)) + c1 * c2
        return PuiseuxSeries(self.ring, out, trunc2)

    def scale(self, c) -> "PuiseuxSeries":
        if not isinstance(c, Polynomial):
            c = Polynomial.constant(self.ring, c)
        return PuiseuxSeries(self.ring, {e: k * c for e, k in self.coeffs.items()}, self.trunc2)

    def derivative(self) -> "PuiseuxSeries":
        """Formal d/dt: t^(e/2) -> (e/2) t^(e/2 - 1)."""
        out = {}
        for e, c in self.coeffs.items():
            if e != 0:
                out[e - 2] = c * Fraction(e, 2)
        return PuiseuxSeries(self.ring, out, self.trunc2 - 2)

    def evaluate(self, t: float, params: dict[str, object]) -> float:
        """Numeric value at t > 0 (principal branch of t^(1/2))."""
        total = 0.0
        for e, c in self.coeffs.items():
            total += float(c.evaluate(params)) * t ** (e / 2)
        return total

    def terms_sorted(self):
        return sorted(self.coeffs.items())


def substitute_series(
    p: Polynomial,
    phase_vars: tuple[str, ...],
    series: dict[str, PuiseuxSeries],
    ring: tuple[str, ...],
    cutoff2: int | None = None,
) -> PuiseuxSeries:
    """Evaluate a system-ring polynomial on series for the phase variables.

    Non-phase variables of ``p`` must be ring variables of the series
    coefficients (they become coefficient content).  ``cutoff2`` optionally
    drops all orders above the given value during accumulation; in that mode
    the returned truncation is the cutoff itself and the caller takes
    responsibility for reliability reasoning.
    """
    phase_idx = [p.vars.index(v) for v in phase_vars]
    param_pos = [(i, v) for i, v in enumerate(p.vars) if v not in phase_vars]
    power_cache: dict[str, list[PuiseuxSeries]] = {}

    def spower(v: str, e: int) -> PuiseuxSeries:
        cache = power_cache.setdefault(v, [PuiseuxSeries.constant(ring, Polynomial.constant(ring, 1))])
        while len(cache) <= e:
            cache.append(cache[-1] * series[v])
        return cache[e]

    total = PuiseuxSeries.zero(ring)
    for exp, coeff in p.terms.items():
        cpoly = Polynomial.constant(ring, coeff)
        for i, v in param_pos:
            if exp[i]:
                cpoly = cpoly * Polynomial.variable(ring, v) ** exp[i]
        term = PuiseuxSeries.constant(ring, cpoly)
        for i, v in zip(phase_idx, phase_vars):
            if exp[i]:
                term = term * spower(v, exp[i])
        total = total + term
    if cutoff2 is not None:
        total = PuiseuxSeries(
            ring, {k: c for k, c in total.coeffs.items() if k <= cutoff2}, cutoff2
        )
    return total


# -------------------------------------------------------------------------
# Fraction-field linear algebra (small matrices over the parameter ring)
# -------------------------------------------------------------------------


class PolyFrac:
    """Quotient of two Polynomials with opportunistic exact cancellation.

    Mixed arithmetic with Polynomial and rational scalars coerces the other
    operand, so PolyFrac coefficients interoperate with polynomial ones
    inside PuiseuxSeries.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.constant(num.vars, 1)
        if den.is_zero():
            raise ZeroDivisionError("PolyFrac with zero denominator")
        if den.is_constant():
            num = num / den.constant_value()
            den = Polynomial.constant(num.vars, 1)
        elif not num.is_zero():
            q, r = reduce_mod(num, den)
            if r.is_zero():
                num = q
                den = Polynomial.constant(num.vars, 1)
            elif len(den.terms) == 1:
                # keep monomial denominators reduced and monic
                dexp, dc = next(iter(den.terms.items()))
                mins = tuple(
                    min(min(e[i] for e in num.terms), dexp[i]) for i in range(len(dexp))
                )
                if any(mins):
                    shift_n = {
                        tuple(a - b for a, b in zip(e, mins)): c
                        for e, c in num.terms.items()
                    }
                    num = Polynomial(num.vars, shift_n)
                    dexp = tuple(a - b for a, b in zip(dexp, mins))
                num = num / dc
                den = Polynomial(num.vars, {dexp: Fraction(1)})
                if den.is_constant():
                    num = num / den.constant_value()
                    den = Polynomial.constant(num.vars, 1)
        if num.is_zero():
            den = Polynomial.constant(num.vars, 1)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, ring, c) -> "PolyFrac":
        return cls(Polynomial.constant(ring, c))

    def _coerce(self, other) -> "PolyFrac | None":
        if isinstance(other, PolyFrac):
            return other
        if isinstance(other, Polynomial):
            return PolyFrac(other)
        if isinstance(other, (int, Fraction)):
            return PolyFrac(Polynomial.constant(self.num.vars, other))
        return None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_rational(self) -> bool:
        return self.is_constant()

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PolyFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PolyFrac(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> "PolyFrac":
        return PolyFrac(-self.num, self.den)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PolyFrac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero PolyFrac")
        return PolyFrac(self.num * other.den, self.den * other.num)

    def evaluate(self, assignment):
        return self.num.evaluate(assignment) / self.den.evaluate(assignment)

    def as_polynomial(self) -> Polynomial:
        if self.den.is_constant():
            return self.num / self.den.constant_value()
        return exact_divide(self.num, self.den)

    def to_text(self) -> str:
        if self.den.is_constant() and self.den.constant_value() == 1:
            return self.num.to_text()
        return f"({self.num.to_text()}) / ({self.den.to_text()})"

    def __repr__(self):
        return f"PolyFrac({self.num.to_text()} / {self.den.to_text()})"


def _rref(matrix: list[list[PolyFrac]], rhs: list[PolyFrac]):
    """Reduced row echelon form of [matrix | rhs] with deterministic pivoting
    (rational-constant pivots preferred).  Returns (rows, rhs, pivot_cols,
    free_cols, consistent)."""
    rows = [list(r) for r in matrix]
    b = list(rhs)
    m = len(rows)
    n = len(rows[0]) if rows else 0
    pivot_cols: list[int] = []
    pivot_rows: list[int] = []
    used: set[int] = set()
    for col in range(n):
        candidates = [r for r in range(m) if r not in used and not rows[r][col].is_zero()]
        if not candidates:
            continue
        constant = [r for r in candidates if rows[r][col].is_rational()]
        r0 = constant[0] if constant else candidates[0]
        piv = rows[r0][col]
        rows[r0] = [x / piv for x in rows[r0]]
        b[r0] = b[r0] / piv
        for r in range(m):
            if r != r0 and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[r0])]
                b[r] = b[r] - f * b[r0]
        used.add(r0)
        pivot_cols.append(col)
        pivot_rows.append(r0)
    consistent = all(b[r].is_zero() for r in range(m) if r not in used)
    free_cols = [c for c in range(n) if c not in pivot_cols]
    return rows, b, pivot_cols, pivot_rows, free_cols, consistent


def solve_affine(matrix: list[list[PolyFrac]], rhs: list[PolyFrac], ring):
    """Solve M v = b over the fraction field.

    Returns (particular, null_basis, consistent); the particular solution sets
    every free coordinate to zero, and null_basis holds one vector per free
    coordinate.
    """
    n = len(matrix[0]) if matrix else 0
    rows, b, pivot_cols, pivot_rows, free_cols, consistent = _rref(matrix, rhs)
    zero = PolyFrac.const(ring, 0)
    particular = [zero] * n
    if consistent:
        for col, row in zip(pivot_cols, pivot_rows):
            particular[col] = b[row]
    basis = []
    for f in free_cols:
        v = [zero] * n
        v[f] = PolyFrac.const(ring, 1)
        for col, row in zip(pivot_cols, pivot_rows):
            v[col] = -rows[row][f]
        basis.append(v)
    return particular, basis, consistent


def _canonical_null_vector(vec: list[PolyFrac], ring) -> list[Polynomial]:
    """Normalize a nullspace vector deterministically.

    Clear denominators and content (primitive vector), orient so the first
    nonzero entry has a positive leading coefficient, then divide by the
    absolute value of the first entry that is a nonzero rational constant (if
    any).  This convention reproduces the customary scaling in which a free
    constant enters one series coefficient with weight exactly +-1.
    """
    den = Polynomial.constant(ring, 1)
    for x in vec:
        if not x.den.is_constant():
            den = den * x.den
    polys = [(x * PolyFrac(den)).as_polynomial() for x in vec]
    # clear rational content
    from math import gcd

    num_g, den_l = 0, 1
    for p in polys:
        c = p.content()
        if c:
            num_g = gcd(num_g, c.numerator)
            den_l = den_l * c.denominator // gcd(den_l, c.denominator)
    if num_g:
        scale = Fraction(den_l, num_g)
        polys = [p * scale for p in polys]
    first = next((p for p in polys if not p.is_zero()), None)
    if first is not None and first.leading()[1] < 0:
        polys = [-p for p in polys]
    for p in polys:
        if not p.is_zero() and p.is_constant():
            polys = [q / abs(p.constant_value()) for q in polys]
            break
    return polys


# -------------------------------------------------------------------------
# Balances
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class Balance:
    """Leading behaviour u_i ~ leading_i * t^(exponents2_i / 2)."""

    ring: tuple[str, ...]
    phase_vars: tuple[str, ...]
    exponents2: tuple[int, ...]
    leading: tuple[Polynomial, ...]
    free_names: tuple[str, ...]

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(e, 2) for e in self.exponents2)


def _dominant_orders(field: VectorField, g2: tuple[int, ...]):
    """Per equation: (mu2, lhs_aligned, dominant monomials)."""
    phase = field.phase_vars
    idx = [field.vars.index(v) for v in phase]
    info = []
    for i, comp in enumerate(field.components):
        orders = {}
        for exp, c in comp.terms.items():
            o = sum(exp[j] * g for j, g in zip(idx, g2))
            orders.setdefault(o, []).append((exp, c))
        lhs = g2[i] - 2
        mu = min([lhs] + list(orders)) if orders else lhs
        info.append((mu, lhs == mu, orders.get(mu, [])))
    return info


def find_balances(
    field: VectorField,
    denominator_bound: int = 2,
    min_exponent: Fraction | int = -3,
    free_names: tuple[str, ...] = DEFAULT_FREE_NAMES,
) -> list[Balance]:
    """Search all negative leading-exponent vectors with denominators dividing
    ``denominator_bound`` for exactly balancing leading behaviour.

    Returns every balance found (possibly none), with leading coefficients as
    polynomials in the parameter ring; unsolved leading coefficients become
    free constants drawn from ``free_names``.
    """
    if denominator_bound not in (1, 2):
        raise ValueError("denominator_bound must be 1 or 2")
    phase = field.phase_vars
    params = tuple(v for v in field.vars if v not in phase)
    ring = params + tuple(free_names)
    step = 2 // denominator_bound
    lo = int(2 * Fraction(min_exponent))
    candidates = itertools.product(*(range(lo, 0, step) for _ in phase))

    c_syms = [sympy.Symbol(f"_c_{v}") for v in phase]
    p_syms = {v: sympy.Symbol(v) for v in params}
    results: list[Balance] = []
    seen = set()
    for g2 in candidates:
        info = _dominant_orders(field, g2)
        # every dominant level needs at least two members to cancel with all
        # leading coefficients nonzero
        if any(len(mons) + (1 if aligned else 0) < 2 for _, aligned, mons in info):
            continue
        eqs = []
        idx = [field.vars.index(v) for v in phase]
        pidx = [(k, v) for k, v in enumerate(field.vars) if v not in phase]
        for i, (mu, aligned, mons) in enumerate(info):
            expr = sympy.Integer(0)
            if aligned:
                expr += sympy.Rational(g2[i], 2) * c_syms[i]
            for exp, c in mons:
                term = sympy.Rational(c)
                for k, v in pidx:
                    if exp[k]:
                        term *= p_syms[v] ** exp[k]
                for j, k in enumerate(idx):
                    if exp[k]:
                        term *= c_syms[j] ** exp[k]
                expr -= term
            eqs.append(expr)
        try:
            sols = sympy.solve(eqs, c_syms, dict=True)
        except Exception:
            continue
        for sol in sols:
            balance = _balance_from_solution(g2, sol, c_syms, phase, params, ring, free_names)
            if balance is None:
                continue
            key = (balance.exponents2, tuple(p.to_text() for p in balance.leading))
            if key not in seen:
                seen.add(key)
                results.append(balance)
    results.sort(key=lambda b: (b.exponents2, tuple(p.to_text() for p in b.leading)))
    return results


def _balance_from_solution(g2, sol, c_syms, phase, params, ring, free_names):
    values = [sympy.together(sol.get(c, c)) for c in c_syms]
    if any(v.is_zero for v in values):
        return None
    free_syms = []
    for c, v in zip(c_syms, values):
        for s in v.free_symbols:
            if s in c_syms and s not in free_syms:
                free_syms.append(s)
    free_syms.sort(key=lambda s: c_syms.index(s))
    if len(free_syms) > len(free_names):
        return None
    rename = {s: sympy.Symbol(free_names[i]) for i, s in enumerate(free_syms)}
    ring_syms = [sympy.Symbol(v) for v in ring]
    leading = []
    for v in values:
        expr = sympy.expand(v.xreplace(rename))
        try:
            p = _poly_from_sympy(expr, ring, ring_syms)
        except (sympy.PolynomialError, ValueError, TypeError):
            return None
        if p.is_zero():
            return None
        leading.append(p)
    used = tuple(free_names[i] for i in range(len(free_syms)))
    return Balance(ring, tuple(phase), tuple(int(x) for x in g2), tuple(leading), used)


def _poly_from_sympy(expr, ring, ring_syms) -> Polynomial:
    poly = sympy.Poly(expr, *ring_syms)
    terms = {}
    for exp, c in poly.terms():
        if not c.is_rational:
            raise ValueError("non-rational coefficient")
        terms[tuple(int(e) for e in exp)] = Fraction(sympy.Rational(c).p, sympy.Rational(c).q)
    return Polynomial(ring, terms)


# -------------------------------------------------------------------------
# Resonances
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class ResonanceReport:
    """Singular orders of the recursive linear step.

    ``entries`` pairs each resonant half-step order (as an exact exponent
    increment above the leading order) with the free-constant names introduced
    there; the time shift t -> t - t0 accounts for one extra parameter at
    order -1 and is reported separately.
    """

    entries: tuple[tuple[Fraction, tuple[str, ...]], ...]
    time_shift_present: bool
    total_parameters_including_shift: int


def _recursion_data(field: VectorField, balance: Balance):
    """Static data of the recursive linear step.

    For equation i and unknown column j the first coupling of the coefficient
    of u_j to the extraction of equation i sits ``delta2[i][j]`` half-steps
    above the extraction aligned with u_j's own order; the column delay
    ``delay2[j]`` is the minimum over rows.  A column with positive delay is
    resolved ``delay2[j]`` half-steps after the extraction row that first
    sees it (staggered recursion); with all delays zero this reduces to the
    classical Kowalewski recursion.

    The time derivative on the left-hand side of equation i couples the
    coefficient of u_i with offset ``lhs2[i] = g2[i] - 2 - mu2[i]`` (zero
    exactly when the derivative is dominant); when lhs2[i] equals the column
    delay it contributes the k-dependent diagonal term of the step matrix.

    Returns (K, lhs2, delay2, mu2) where K[i][j] is the polynomial coupling
    coefficient of the staggered unknown in row i.
    """
    phase = field.phase_vars
    idx = [field.vars.index(v) for v in phase]
    pidx = [(k, v) for k, v in enumerate(field.vars) if v not in phase]
    g2 = balance.exponents2
    info = _dominant_orders(field, g2)
    mu2 = [info[i][0] for i in range(len(phase))]
    lhs2 = [g2[i] - 2 - mu2[i] for i in range(len(phase))]
    ring = balance.ring
    n = len(phase)

    def mono_order(exp):
        return sum(exp[k] * g for k, g in zip(idx, g2))

    derivs = [[field.components[i].diff(v) for v in phase] for i in range(n)]
    delta2 = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = derivs[i][j]
            if not d.is_zero():
                mo = min(mono_order(exp) for exp in d.terms)
                delta2[i][j] = mo - (mu2[i] - g2[j])
            if i == j:
                delta2[i][j] = lhs2[i] if delta2[i][j] is None else min(delta2[i][j], lhs2[i])
    delay2 = []
    for j in range(n):
        col = [delta2[i][j] for i in range(n) if delta2[i][j] is not None]
        if not col:
            raise ExpansionError(
                f"variable {phase[j]!r} is decoupled from the recursion"
            )
        delay2.append(min(col))

    K = [[Polynomial.zero(ring) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            target = mu2[i] - g2[j] + delay2[j]
            acc = Polynomial.zero(ring)
            for exp, c in derivs[i][j].terms.items():
                if mono_order(exp) != target:
                    continue
                term = Polynomial.constant(ring, c)
                for k, v in pidx:
                    if exp[k]:
                        term = term * Polynomial.variable(ring, v) ** exp[k]
                for jj, k in enumerate(idx):
                    if exp[k]:
                        term = term * balance.leading[jj] ** exp[k]
                acc = acc + term
            K[i][j] = acc
    return K, lhs2, delay2, mu2


def _step_matrix(data, balance: Balance, k: int) -> list[list[PolyFrac]]:
    """The full square staggered step matrix at half-step index k: column j
    carries the coefficient of phase variable j at exponent
    (exponents2[j] + k - delay2[j]) / 2."""
    K, lhs2, delay2, _ = data
    ring = balance.ring
    n = len(balance.phase_vars)
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = -K[i][j]
            if i == j and lhs2[i] == delay2[j]:
                entry = entry + Polynomial.constant(
                    ring, Fraction(balance.exponents2[i] + (k - delay2[j]), 2)
                )
            row.append(PolyFrac(entry))
        M.append(row)
    return M


def kowalewski_exponents(
    field: VectorField,
    balance: Balance,
    max_halfsteps: int = 24,
    free_names: tuple[str, ...] = DEFAULT_FREE_NAMES,
) -> ResonanceReport:
    """Scan half-step orders for singular recursion matrices.

    Free coordinates of a singular step matrix at index k belong to phase
    variable j at exponent increment (k - delay2[j])/2 above its leading
    order; increment -1 is the time shift, increment 0 the leading-order
    frees already named by the balance.
    """
    ring = balance.ring
    data = _recursion_data(field, balance)
    _, _, delay2, _ = data
    n = len(balance.phase_vars)
    orders: dict[Fraction, int] = {}
    time_shift = False
    for k in range(-4, max_halfsteps + 1):
        M = _step_matrix(data, balance, k)
        zero = [PolyFrac.const(ring, 0)] * n
        rows, _, pivot_cols, pivot_rows, free_cols, _ = _rref(M, zero)
        for f in free_cols:
            vec = [PolyFrac.const(ring, 0)] * n
            vec[f] = PolyFrac.const(ring, 1)
            for col, row in zip(pivot_cols, pivot_rows):
                vec[col] = -rows[row][f]
            # a null mode's order is where it first perturbs the solution
            s = min(
                Fraction(k - delay2[j], 2) for j in range(n) if not vec[j].is_zero()
            )
            if s == -1:
                time_shift = True
            elif s >= 0 and 2 * s <= max_halfsteps:
                orders[s] = orders.get(s, 0) + 1
    entries = []
    queue = [n for n in free_names if n not in balance.free_names]
    total = 0
    for s in sorted(orders):
        count = orders[s]
        if s == 0:
            names = balance.free_names
            if count != len(names):
                names = tuple(f"k0_{i}" for i in range(count))
        else:
            names = tuple(queue.pop(0) if queue else f"free{s}_{i}" for i in range(count))
        total += count
        entries.append((s, names))
    return ResonanceReport(tuple(entries), time_shift, total + 1)


# -------------------------------------------------------------------------
# Recursive expansion
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionResult:
    balance: Balance
    series: dict[str, PuiseuxSeries]
    resonances: ResonanceReport


def expand_solution(
    field: VectorField,
    balance: Balance,
    order_halfsteps: int = 12,
    free_names: tuple[str, ...] = DEFAULT_FREE_NAMES,
) -> ExpansionResult:
    """Expand the series solution ``order_halfsteps`` half-steps beyond the
    leading exponents.

    At each order the linear step is solved exactly over the parameter ring;
    singular steps must be consistent (this is the Painleve compatibility
    condition, verified rather than assumed) and introduce free constants via
    a deterministic nullspace normalization.

    The recursion is staggered: the coefficient of phase variable j at
    ``delay2[j]/2`` below the current extraction order is the unknown of the
    step, so variables that enter the dominant couplings late (positive
    delay) are resolved at later steps instead of appearing as spurious zero
    columns.
    """
    ring = balance.ring
    phase = balance.phase_vars
    g2 = balance.exponents2
    data = _recursion_data(field, balance)
    _, _, delay2, mus = data
    n = len(phase)
    max_d = max(delay2)

    coeffs: dict[str, dict[int, Polynomial]] = {
        v: {g2[i]: balance.leading[i]} for i, v in enumerate(phase)
    }
    queue = [nm for nm in free_names if nm not in balance.free_names]
    raw_entries: list[tuple[Fraction, str]] = []

    for k in range(1, order_halfsteps + max_d + 1):
        # residual of the current partial sum, one coefficient per equation
        series_now = {
            v: PuiseuxSeries(ring, dict(coeffs[v]), g2[i] + k)
            for i, v in enumerate(phase)
        }
        rhs = []
        for i, v in enumerate(phase):
            cutoff = mus[i] + k
            ps = substitute_series(field.components[i], phase, series_now, ring, cutoff2=cutoff)
            resid = series_now[v].derivative()
            want = resid.coeffs.get(cutoff, Polynomial.zero(ring)) - ps.coeffs.get(
                cutoff, Polynomial.zero(ring)
            )
            want = -want
            rhs.append(want if isinstance(want, PolyFrac) else PolyFrac(want))
        full = _step_matrix(data, balance, k)
        cols = [j for j in range(n) if k - delay2[j] >= 1]
        M = [[full[i][j] for j in cols] for i in range(n)]
        rows, b, pivot_cols, pivot_rows, free_cols, consistent = _rref(M, rhs)
        if not consistent:
            raise ExpansionError(
                f"inconsistent linear step at half-step {k} (order {Fraction(k, 2)} above leading)"
            )
        zero = PolyFrac.const(ring, 0)
        particular = [zero] * len(cols)
        for col, row in zip(pivot_cols, pivot_rows):
            particular[col] = b[row]
        # coefficients stay polynomial when possible, rational otherwise
        solution = []
        for p in particular:
            try:
                solution.append(p.as_polynomial())
            except ValueError:
                solution.append(p)
        for f in free_cols:
            vec = [zero] * len(cols)
            vec[f] = PolyFrac.const(ring, 1)
            for col, row in zip(pivot_cols, pivot_rows):
                vec[col] = -rows[row][f]
            name = queue.pop(0) if queue else None
            if name is None or name not in ring:
                raise ExpansionError(
                    f"no free-constant name available at half-step {k}"
                )
            null_poly = _canonical_null_vector(vec, ring)
            sym = Polynomial.variable(ring, name)
            solution = [s + sym * q for s, q in zip(solution, null_poly)]
            order = min(
                Fraction(k - delay2[j], 2)
                for idx, j in enumerate(cols)
                if not vec[idx].is_zero()
            )
            raw_entries.append((order, name))
        for idx, j in enumerate(cols):
            if not solution[idx].is_zero():
                coeffs[phase[j]][g2[j] + (k - delay2[j])] = solution[idx]

    series = {
        v: PuiseuxSeries(ring, coeffs[v], g2[i] + order_halfsteps) for i, v in enumerate(phase)
    }
    grouped: dict[Fraction, list[str]] = {}
    for s, name in raw_entries:
        grouped.setdefault(s, []).append(name)
    entries = [(Fraction(0), balance.free_names)] if balance.free_names else []
    for s in sorted(grouped):
        entries.append((s, tuple(grouped[s])))
    entries.sort(key=lambda e: e[0])
    total = sum(len(names) for _, names in entries) + 1
    report = ResonanceReport(tuple(entries), True, total)
    return ExpansionResult(balance, series, report)


def principal_expansion(
    field: VectorField,
    order_halfsteps: int = 12,
    free_names: tuple[str, ...] = DEFAULT_FREE_NAMES,
) -> ExpansionResult:
    """Expand every balance and return the consistent one with the most free
    parameters; balances that hit an inconsistent step are discarded (they
    do not extend to series solutions)."""
    balances = find_balances(field, free_names=free_names)
    if not balances:
        raise ExpansionError("no balance found for the field")
    best = None
    for bal in balances:
        try:
            result = expand_solution(field, bal, order_halfsteps, free_names)
        except ExpansionError:
            continue
        if best is None or (
            result.resonances.total_parameters_including_shift
            > best.resonances.total_parameters_including_shift
        ):
            best = result
    if best is None:
        raise ExpansionError("no balance extends to a consistent series solution")
    return best


def ode_residual(field: VectorField, result: ExpansionResult) -> dict[str, PuiseuxSeries]:
    """d(series)/dt - field(series), with honest truncation propagation.

    For a correct expansion every stored coefficient of every residual is the
    zero polynomial (the residual series are empty up to their truncation).
    """
    ring = result.balance.ring
    phase = result.balance.phase_vars
    out = {}
    for i, v in enumerate(phase):
        ps = substitute_series(field.components[i], phase, result.series, ring)
        out[v] = result.series[v].derivative() - ps
    return out


# -------------------------------------------------------------------------
# Residue relations and the blow-up curve
# -------------------------------------------------------------------------


def invariant_restriction(
    result: ExpansionResult, invariant: Polynomial
) -> Polynomial:
    """Restrict an invariant to the series solution.

    Every non-constant coefficient of H(series(t)) within the reliable range
    must vanish identically in the parameter ring; the constant coefficient is
    the residue relation and is returned.
    """
    ring = result.balance.ring
    phase = result.balance.phase_vars
    ps = substitute_series(invariant, phase, result.series, ring)
    if ps.trunc2 < 0:
        raise RestrictionError(
            "series too shallow to reach the constant coefficient of the invariant"
        )
    for e, c in sorted(ps.coeffs.items()):
        if e != 0 and not c.is_zero():
            raise RestrictionError(
                f"invariant restriction has non-constant term at order {Fraction(e, 2)}: {c.to_text()}"
            )
    return ps.coeffs.get(0, Polynomial.zero(ring))


CURVE_RING = variables("A b1 b2 alpha beta gamma")


@dataclass(frozen=True)
class CurveRelation:
    relation_h1: Polynomial        # residue relation minus its level constant b1
    relation_h2: Polynomial        # residue relation minus b2
    gamma_solution: tuple[Polynomial, Polynomial]   # gamma = -c0/c1
    curve: Polynomial              # eliminated relation in Q[A,b1,b2][alpha,beta]
    back_substitution_zero: bool
    comparison: tuple[tuple[str, Fraction, Fraction], ...]  # (monomial, derived, printed)
    matches_printed: bool


def eliminate_and_compare_curve(
    relation_h1: Polynomial,
    relation_h2: Polynomial,
    eliminate: str = "gamma",
) -> CurveRelation:
    """Eliminate one parameter linearly between the two residue relations.

    ``relation_h1`` must be degree 1 in the eliminated parameter.  The
    resulting polynomial in the remaining parameters is normalized so the
    level constant b2 enters with coefficient +1, then compared monomial by
    monomial against the printed curve.
    """
    r1 = relation_h1.rename(CURVE_RING) - Polynomial.variable(CURVE_RING, "b1")
    r2 = relation_h2.rename(CURVE_RING) - Polynomial.variable(CURVE_RING, "b2")
    if r1.degree_in(eliminate) != 1:
        raise EliminationError(f"first relation is not linear in {eliminate}")
    c1 = r1.coefficient_of(eliminate, 1)
    c0 = r1.coefficient_of(eliminate, 0)
    if c1.is_zero():
        raise EliminationError(f"coefficient of {eliminate} vanishes; elimination impossible")
    d = max(r2.degree_in(eliminate), 0)
    eliminated = Polynomial.zero(CURVE_RING)
    for j in range(d + 1):
        aj = r2.coefficient_of(eliminate, j)
        eliminated = eliminated + aj * ((-c0) ** j) * (c1 ** (d - j))
    # back-substitution into r1, scaled by c1 to stay polynomial
    back = c1 * c0 + c1 * (-c0)
    back_ok = back.is_zero()
    # normalize: coefficient of the bare b2 monomial becomes +1
    b2_exp = tuple(1 if v == "b2" else 0 for v in CURVE_RING)
    b2_coeff = eliminated.terms.get(b2_exp, Fraction(0))
    if b2_coeff:
        curve = eliminated / b2_coeff
    else:
        curve = eliminated.primitive()
    printed = printed_curve()
    comparison = []
    monos = set(curve.terms) | set(printed.terms)
    for exp in sorted(monos, reverse=True):
        mono = "*".join(f"{v}^{e}" for v, e in zip(CURVE_RING, exp) if e) or "1"
        comparison.append(
            (mono, curve.terms.get(exp, Fraction(0)), printed.terms.get(exp, Fraction(0)))
        )
    matches = curve == printed
    return CurveRelation(
        relation_h1=r1,
        relation_h2=r2,
        gamma_solution=(c0, c1),
        curve=curve,
        back_substitution_zero=back_ok,
        comparison=tuple(comparison),
        matches_printed=matches,
    )


# -------------------------------------------------------------------------
# Printed comparison targets
# -------------------------------------------------------------------------

_SERIES_RING = variables("A alpha beta gamma delta mu")


def printed_series_case3() -> dict[str, dict[int, Polynomial]]:
    """The series display for the four-variable system, stored verbatim as a
    comparison target (keys are twice the exponent)."""

    def p(s):
        return parse_polynomial(s, _SERIES_RING)

    return {
        "y1": {
            -1: p("alpha"),
            3: p("beta"),
            5: p("-alpha/18"),
            7: p("alpha*A^2/10"),
            9: p("-alpha^2*beta/18"),
        },
        "y2": {
            -4: p("-3/8"),
            0: p("-A/2"),
            2: p("alpha^2/12"),
            4: p("-2*A^2/5"),
            6: p("alpha*beta/3"),
            8: p("-gamma"),
        },
        "x1": {
            -3: p("-alpha/2"),
            1: p("3*beta/2"),
            3: p("-5*alpha/36"),
            5: p("7*alpha*A^2/20"),
            7: p("-alpha^2*beta/4"),
        },
        "x2": {
            -6: p("3/4"),
            0: p("alpha^2/12"),
            2: p("-4*A^2/5"),
            4: p("alpha*beta"),
            6: p("-4*gamma"),
        },
    }


def compare_with_printed(
    series: dict[str, PuiseuxSeries],
    printed: dict[str, dict[int, Polynomial]] | None = None,
):
    """Per-coefficient diff of a computed series family against the printed
    display.  Returns records (variable, exponent, computed, printed, match);
    mismatches are findings about the print, not failures."""
    if printed is None:
        printed = printed_series_case3()
    records = []
    for var, table in printed.items():
        if var not in series:
            continue
        s = series[var]
        for e2, printed_c in sorted(table.items()):
            if e2 > s.trunc2:
                continue
            computed = s.coeffs.get(e2, Polynomial.zero(s.ring))
            printed_here = printed_c.rename(s.ring)
            records.append(
                (var, Fraction(e2, 2), computed, printed_here, computed == printed_here)
            )
    return records


def printed_residue_relations() -> tuple[Polynomial, Polynomial]:
    """The printed restrictions of H1 and H2 to the series (levels b1, b2)."""
    h1 = parse_polynomial(
        "1/9*alpha^2 - 21/4*gamma + 13/288*alpha^4 + 4/3*A^3", _SERIES_RING
    )
    h2 = parse_polynomial(
        "-144*alpha*beta^3 + 294/5*alpha^3*beta*A^2 + 8/9*alpha^6 - 33*gamma*alpha^4",
        _SERIES_RING,
    )
    return h1, h2


def printed_curve() -> Polynomial:
    """The printed blow-up curve connecting alpha and beta."""
    return parse_polynomial(
        "144*alpha*beta^3 - 294/5*A^2*alpha^3*beta + 143/504*alpha^8"
        " - 4/21*alpha^6 + 44/21*(4*A^3 - 3*b1)*alpha^4 + b2",
        CURVE_RING,
    )
