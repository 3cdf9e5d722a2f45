"""Poisson brackets and exact verification of the structural claims:
commutation of the invariants, Jacobi identity, Casimir property, and the
agreement of the printed second flow with the bracket-generated one modulo
the Casimir.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactpoly import Polynomial, reduce_mod
from .hamsys import PoissonStructure, VectorField

__all__ = [
    "BracketReport",
    "JacobiReport",
    "bracket",
    "hamiltonian_vector_field",
    "jacobi_check",
    "casimir_check",
    "lie_bracket_fields",
    "field_identity_mod_casimir",
]


@dataclass(frozen=True)
class BracketReport:
    pair: tuple[str, str]
    bracket: Polynomial
    is_zero: bool


@dataclass(frozen=True)
class JacobiReport:
    """Jacobi residuals on coordinate-function triples.  Coordinate triples
    suffice because the bracket is a biderivation in each argument."""

    triples: tuple[tuple[int, int, int, Polynomial], ...]
    passed: bool


def bracket(f: Polynomial, g: Polynomial, structure: PoissonStructure) -> Polynomial:
    """{f, g} = sum_{k,l} J[k][l] * df/dz_k * dg/dz_l over the phase
    variables."""
    if f.vars != structure.vars or g.vars != structure.vars:
        raise ValueError("bracket arguments must live in the structure's ring")
    phase = structure.phase_vars
    df = [f.diff(v) for v in phase]
    dg = [g.diff(v) for v in phase]
    out = Polynomial.zero(structure.vars)
    for k in range(len(phase)):
        if df[k].is_zero():
            continue
        for l in range(len(phase)):
            j = structure.matrix[k][l]
            if j.is_zero() or dg[l].is_zero():
                continue
            out = out + j * df[k] * dg[l]
    return out


def hamiltonian_vector_field(h: Polynomial, structure: PoissonStructure) -> VectorField:
    """The field z_dot = J * grad h."""
    if h.vars != structure.vars:
        raise ValueError("hamiltonian must live in the structure's ring")
    phase = structure.phase_vars
    dh = [h.diff(v) for v in phase]
    comps = []
    for k in range(len(phase)):
        c = Polynomial.zero(structure.vars)
        for l in range(len(phase)):
            c = c + structure.matrix[k][l] * dh[l]
        comps.append(c)
    return VectorField(structure.vars, phase, tuple(comps))


def jacobi_check(structure: PoissonStructure) -> JacobiReport:
    """Exact Jacobi residuals {z_i,{z_j,z_k}} + cyclic on all coordinate
    triples i < j < k."""
    phase = structure.phase_vars
    zs = [Polynomial.variable(structure.vars, v) for v in phase]
    n = len(phase)
    triples = []
    ok = True
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                res = (
                    bracket(zs[i], bracket(zs[j], zs[k], structure), structure)
                    + bracket(zs[j], bracket(zs[k], zs[i], structure), structure)
                    + bracket(zs[k], bracket(zs[i], zs[j], structure), structure)
                )
                triples.append((i, j, k, res))
                ok = ok and res.is_zero()
    return JacobiReport(tuple(triples), ok)


def casimir_check(f: Polynomial, structure: PoissonStructure) -> bool:
    """True iff J * grad f vanishes identically."""
    return all(c.is_zero() for c in hamiltonian_vector_field(f, structure).components)


def lie_bracket_fields(x: VectorField, y: VectorField) -> VectorField:
    """Commutator [X, Y]_i = sum_j (X_j dY_i/dz_j - Y_j dX_i/dz_j)."""
    if x.vars != y.vars or x.phase_vars != y.phase_vars:
        raise ValueError("fields must share a phase space")
    comps = []
    for i in range(x.dim):
        c = Polynomial.zero(x.vars)
        for j, v in enumerate(x.phase_vars):
            c = c + x.components[j] * y.components[i].diff(v)
            c = c - y.components[j] * x.components[i].diff(v)
        comps.append(c)
    return VectorField(x.vars, x.phase_vars, tuple(comps))


def field_identity_mod_casimir(x: VectorField, y: VectorField, casimir: Polynomial):
    """Reduce each component difference X_i - Y_i modulo the Casimir.

    Returns a list of (component index, exact difference, remainder).  All
    remainders zero certifies that the two fields agree on the zero level of
    the Casimir.
    """
    if x.vars != y.vars or x.phase_vars != y.phase_vars:
        raise ValueError("fields must share a phase space")
    if casimir.is_zero():
        raise ValueError("casimir must be nonzero")
    out = []
    for i in range(x.dim):
        diff = x.components[i] - y.components[i]
        _, rem = reduce_mod(diff, casimir)
        out.append((i, diff, rem))
    return out
