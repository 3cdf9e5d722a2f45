"""Catalog of the concrete systems: the generalized Henon-Heiles field, its
integrable case (iii) specialization, the five-variable master system, their
invariants and Poisson matrices, and the quadratic change of variables
connecting the two.

Parameters (A, B, eps) are ordinary ring variables, so every identity below
can be certified with the parameters fully symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactpoly import Polynomial, parse_polynomial, variables

__all__ = [
    "VectorField",
    "PoissonStructure",
    "SystemBundle",
    "PolynomialMap",
    "GENERAL_VARS",
    "CASE3_VARS",
    "MASTER_VARS",
    "build_henon_heiles",
    "build_general_bundle",
    "build_case3_bundle",
    "build_master_bundle",
    "build_morphism",
    "apply_morphism",
    "pushforward_check",
    "pullback_invariants",
    "case3_second_flow_printed",
    "master_second_flow_printed",
    "get_bundle",
    "BUNDLE_NAMES",
]

GENERAL_VARS = variables("y1 y2 x1 x2 A B eps")
CASE3_VARS = variables("y1 y2 x1 x2 A")
MASTER_VARS = variables("z1 z2 z3 z4 z5 A")

CASE3_PHASE = ("y1", "y2", "x1", "x2")
MASTER_PHASE = ("z1", "z2", "z3", "z4", "z5")


@dataclass(frozen=True)
class VectorField:
    """Polynomial vector field: one component per phase variable.  The
    components may also involve parameter variables of the ring."""

    vars: tuple[str, ...]
    phase_vars: tuple[str, ...]
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.components) != len(self.phase_vars):
            raise ValueError("component count must equal phase dimension")
        for c in self.components:
            if c.vars != self.vars:
                raise ValueError("all components must share the field's variable set")

    @property
    def dim(self) -> int:
        return len(self.phase_vars)

    def lie_derivative(self, h: Polynomial) -> Polynomial:
        """<grad h, field> over the phase variables: the time derivative of h
        along the flow."""
        if h.vars != self.vars:
            raise ValueError("variable set mismatch")
        out = Polynomial.zero(self.vars)
        for v, comp in zip(self.phase_vars, self.components):
            out = out + h.diff(v) * comp
        return out


@dataclass(frozen=True)
class PoissonStructure:
    """Skew-symmetric matrix of polynomials over the phase variables."""

    vars: tuple[str, ...]
    phase_vars: tuple[str, ...]
    matrix: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        n = len(self.phase_vars)
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise ValueError("Poisson matrix must be square over the phase variables")
        for k in range(n):
            for l in range(n):
                if not (self.matrix[k][l] + self.matrix[l][k]).is_zero():
                    raise ValueError(f"Poisson matrix not skew-symmetric at ({k},{l})")

    @property
    def dim(self) -> int:
        return len(self.phase_vars)


@dataclass(frozen=True)
class SystemBundle:
    """A named system with its field, invariants and Poisson structure."""

    name: str
    field: VectorField
    invariants: tuple[tuple[str, Polynomial], ...]
    poisson: PoissonStructure | None
    parameters: tuple[str, ...] = ()

    def invariant(self, name: str) -> Polynomial:
        for n, p in self.invariants:
            if n == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class PolynomialMap:
    """Polynomial map between phase spaces; images live in the source ring."""

    source_vars: tuple[str, ...]
    source_phase: tuple[str, ...]
    target_vars: tuple[str, ...]
    target_phase: tuple[str, ...]
    images: tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.images) != len(self.target_phase):
            raise ValueError("one image per target phase variable required")

    def pullback(self, p: Polynomial) -> Polynomial:
        """Compose a target-ring polynomial with the map."""
        if p.vars != self.target_vars:
            raise ValueError("pullback argument must live in the target ring")
        images = {z: img for z, img in zip(self.target_phase, self.images)}
        for v in self.target_vars:
            if v not in images:
                # shared parameters map to themselves
                images[v] = Polynomial.variable(self.source_vars, v)
        return p.substitute(images)

    def evaluate(self, point):
        """Numeric image of a source phase point."""
        if len(point) != len(self.source_phase):
            raise ValueError("point dimension mismatch")
        assignment = dict(zip(self.source_phase, point))
        for v in self.source_vars:
            assignment.setdefault(v, 0)
        return [img.evaluate(assignment) for img in self.images]


# -------------------------------------------------------------------------
# Generalized Henon-Heiles system
# -------------------------------------------------------------------------


def build_henon_heiles() -> VectorField:
    """The four-component field of the generalized Henon-Heiles hamiltonian
    with all three parameters (A, B, eps) symbolic."""
    comps = tuple(
        parse_polynomial(s, GENERAL_VARS)
        for s in (
            "x1",
            "x2",
            "-A*y1 - 2*y1*y2",
            "-B*y2 - y1^2 - eps*y2^2",
        )
    )
    return VectorField(GENERAL_VARS, CASE3_PHASE, comps)


def general_hamiltonian() -> Polynomial:
    return parse_polynomial(
        "1/2*(x1^2 + x2^2) + 1/2*(A*y1^2 + B*y2^2) + y1^2*y2 + eps/3*y2^3",
        GENERAL_VARS,
    )


def case3_H2_general() -> Polynomial:
    """The case (iii) second invariant written in the general ring, used as a
    negative control: it is conserved only at eps=16, B=16A."""
    return parse_polynomial(
        "3*x1^4 + 6*A*x1^2*y1^2 + 12*x1^2*y1^2*y2 - 4*x1*x2*y1^3"
        " - 4*A*y1^4*y2 - 4*y1^4*y2^2 + 3*A^2*y1^4 - 2/3*y1^6",
        GENERAL_VARS,
    )


def canonical_poisson(vars: tuple[str, ...], phase: tuple[str, ...]) -> PoissonStructure:
    """The constant symplectic matrix (O I / -I O) for (q1..qn, p1..pn)."""
    n = len(phase)
    if n % 2:
        raise ValueError("canonical structure needs an even phase dimension")
    half = n // 2
    zero = Polynomial.zero(vars)
    one = Polynomial.constant(vars, 1)
    m = [[zero] * n for _ in range(n)]
    for i in range(half):
        m[i][half + i] = one
        m[half + i][i] = -one
    return PoissonStructure(vars, phase, tuple(tuple(row) for row in m))


def build_general_bundle() -> SystemBundle:
    return SystemBundle(
        name="hh-general",
        field=build_henon_heiles(),
        invariants=(
            ("H1", general_hamiltonian()),
            ("H2", case3_H2_general()),
        ),
        poisson=canonical_poisson(GENERAL_VARS, CASE3_PHASE),
        parameters=("A", "B", "eps"),
    )


def build_case3_bundle() -> SystemBundle:
    """Case (iii): eps=16, B=16A, with the quartic-degree second invariant."""
    h1 = parse_polynomial(
        "1/2*(x1^2 + x2^2) + A/2*(y1^2 + 16*y2^2) + y1^2*y2 + 16/3*y2^3",
        CASE3_VARS,
    )
    h2 = parse_polynomial(
        "3*x1^4 + 6*A*x1^2*y1^2 + 12*x1^2*y1^2*y2 - 4*x1*x2*y1^3"
        " - 4*A*y1^4*y2 - 4*y1^4*y2^2 + 3*A^2*y1^4 - 2/3*y1^6",
        CASE3_VARS,
    )
    comps = tuple(
        parse_polynomial(s, CASE3_VARS)
        for s in (
            "x1",
            "x2",
            "-A*y1 - 2*y1*y2",
            "-16*A*y2 - y1^2 - 16*y2^2",
        )
    )
    return SystemBundle(
        name="hh-case3",
        field=VectorField(CASE3_VARS, CASE3_PHASE, comps),
        invariants=(("H1", h1), ("H2", h2)),
        poisson=canonical_poisson(CASE3_VARS, CASE3_PHASE),
        parameters=("A",),
    )


def case3_second_flow_printed() -> VectorField:
    """The degree-two "second flow" listing for the four-variable system, kept
    verbatim as data.  Note: this listing is NOT the hamiltonian field of the
    quartic H2 above (their polynomial degrees already disagree); it is stored
    for the comparison report only."""
    comps = tuple(
        parse_polynomial(s, CASE3_VARS)
        for s in (
            "-24*A*x1 - 8*x1*y2 + 4*x2*y1",
            "4*x1*y1",
            "24*A^2*y1 - 4*x1*x2 - 8*A*y1*y2 - 8*y1*y2^2 - 4*y1^3",
            "4*x1^2 - 4*A*y1^2 - 8*y1^2*y2",
        )
    )
    return VectorField(CASE3_VARS, CASE3_PHASE, comps)


# -------------------------------------------------------------------------
# Five-variable master system
# -------------------------------------------------------------------------


def master_field() -> VectorField:
    comps = tuple(
        parse_polynomial(s, MASTER_VARS)
        for s in (
            "2*z4",
            "z3",
            "-z1 - 16*A*z2 - 16*z2^2",
            "-A*z1 + 1/3*z5 - 8/3*z1*z2",
            "-6*A*z4 + 2*z1*z3 - 8*z2*z4",
        )
    )
    return VectorField(MASTER_VARS, MASTER_PHASE, comps)


def master_invariants() -> tuple[tuple[str, Polynomial], ...]:
    f1 = parse_polynomial(
        "1/2*A*z1 + 1/6*z5 + 8*A*z2^2 + 1/2*z3^2 + 2/3*z1*z2 + 16/3*z2^3",
        MASTER_VARS,
    )
    f2 = parse_polynomial(
        "9*A^2*z1^2 + z5^2 + 6*A*z1*z5 - 2*z1^3 - 24*A*z1^2*z2"
        " - 12*z1*z3*z4 + 24*z2*z4^2 - 16*z1^2*z2^2",
        MASTER_VARS,
    )
    f3 = parse_polynomial("z1*z5 - 3*z4^2 - 2*z1^2*z2", MASTER_VARS)
    return (("F1", f1), ("F2", f2), ("F3", f3))


def master_poisson() -> PoissonStructure:
    rows = (
        ("0", "0", "0", "2*z1", "12*z4"),
        ("0", "0", "1", "0", "0"),
        ("0", "-1", "0", "0", "-2*z1"),
        ("-2*z1", "0", "0", "0", "-8*z1*z2 + 2*z5"),
        ("-12*z4", "0", "2*z1", "8*z1*z2 - 2*z5", "0"),
    )
    matrix = tuple(tuple(parse_polynomial(s, MASTER_VARS) for s in row) for row in rows)
    return PoissonStructure(MASTER_VARS, MASTER_PHASE, matrix)


def build_master_bundle() -> SystemBundle:
    return SystemBundle(
        name="master",
        field=master_field(),
        invariants=master_invariants(),
        poisson=master_poisson(),
        parameters=("A",),
    )


def master_second_flow_printed() -> VectorField:
    """The explicit second-flow listing of the five-variable system.  Its z3
    component differs from J*grad(F2) by a multiple of the Casimir F3, so the
    two agree on the F3 = 0 locus; see poisson.field_identity_mod_casimir."""
    comps = tuple(
        parse_polynomial(s, MASTER_VARS)
        for s in (
            "24*z4*z5 - 24*z1^2*z3 + 96*z1*z2*z4 + 72*A*z1*z4",
            "-12*z1*z4",
            "12*A*z1^2 - 12*z1*z5 + 48*z1^2*z2",
            "4*z5^2 - 36*A^2*z1^2 + 12*z1^3 - 16*z1*z2*z5 + 48*A*z1^2*z2"
            " + 24*z1*z3*z4 + 64*z1^2*z2^2",
            "-96*z2*z4*z5 + 768*z1*z2^2*z4 - 72*A*z4*z5 + 576*A*z1*z2*z4"
            " + 144*z3*z4^2 - 216*A^2*z1*z4 + 48*z1^2*z4 - 96*z1^2*z2*z3"
            " + 24*z1*z3*z5",
        )
    )
    return VectorField(MASTER_VARS, MASTER_PHASE, comps)


# -------------------------------------------------------------------------
# The connecting map
# -------------------------------------------------------------------------


def build_morphism() -> PolynomialMap:
    """(y1, y2, x1, x2) -> (y1^2, y2, x2, y1*x1, 3*x1^2 + 2*y1^2*y2), a 2:1
    cover of the four-variable phase space onto the zero level of the Casimir
    F3."""
    images = tuple(
        parse_polynomial(s, CASE3_VARS)
        for s in ("y1^2", "y2", "x2", "y1*x1", "3*x1^2 + 2*y1^2*y2")
    )
    return PolynomialMap(CASE3_VARS, CASE3_PHASE, MASTER_VARS, MASTER_PHASE, images)


def apply_morphism(point):
    """Numeric image of a 4-space point under the connecting map."""
    return build_morphism().evaluate(point)


def pushforward_check(source: VectorField, mapping: PolynomialMap, target: VectorField):
    """Residual of the pushforward identity, one polynomial per target
    component:

        residual_i = sum_j d(map_i)/d(u_j) * source_j  -  target_i o map.

    An all-zero residual certifies that the map carries the source flow onto
    the target flow.
    """
    if mapping.source_phase != source.phase_vars or mapping.target_phase != target.phase_vars:
        raise ValueError("map dimensions do not match the fields")
    residuals = []
    for img, tgt in zip(mapping.images, target.components):
        pushed = Polynomial.zero(mapping.source_vars)
        for u, comp in zip(source.phase_vars, source.components):
            pushed = pushed + img.diff(u) * comp
        residuals.append(pushed - mapping.pullback(tgt))
    return residuals


def pullback_invariants(mapping: PolynomialMap):
    """Pull the master invariants back through the map and difference them
    against H1, 3*H2 and 0.  Returns a list of (name, pullback, difference)."""
    case3 = build_case3_bundle()
    pulled = {n: mapping.pullback(p) for n, p in master_invariants()}
    expected = {
        "F1": case3.invariant("H1"),
        "F2": case3.invariant("H2") * 3,
        "F3": Polynomial.zero(CASE3_VARS),
    }
    return [(n, pulled[n], pulled[n] - expected[n]) for n in ("F1", "F2", "F3")]


BUNDLE_NAMES = ("hh-general", "hh-case3", "master")


def get_bundle(name: str) -> SystemBundle:
    builders = {
        "hh-general": build_general_bundle,
        "hh-case3": build_case3_bundle,
        "master": build_master_bundle,
    }
    if name not in builders:
        raise KeyError(f"unknown system {name!r}; choose from {BUNDLE_NAMES}")
    return builders[name]()
