"""Exact symbolic verification and numerical simulation of the integrable
generalized Henon-Heiles system (case with first integrals in involution) and
its five-variable master system, linked by a polynomial morphism."""

from .exactpoly import Polynomial, parse_polynomial, reduce_mod, variables
from .hamsys import (
    BUNDLE_NAMES,
    PolynomialMap,
    PoissonStructure,
    SystemBundle,
    VectorField,
    apply_morphism,
    build_case3_bundle,
    build_general_bundle,
    build_master_bundle,
    build_morphism,
    get_bundle,
)
from .poisson import (
    bracket,
    casimir_check,
    hamiltonian_vector_field,
    jacobi_check,
    lie_bracket_fields,
)
from .puiseux import (
    Balance,
    ExpansionResult,
    PuiseuxSeries,
    ResonanceReport,
    eliminate_and_compare_curve,
    expand_solution,
    find_balances,
    invariant_restriction,
    kowalewski_exponents,
    ode_residual,
    principal_expansion,
)
from .flow import (
    IntegrationOptions,
    Trajectory,
    commute_flows,
    integrate,
    invariant_drift,
    series_state,
)

__version__ = "0.1.0"
