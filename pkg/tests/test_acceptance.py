"""Acceptance suite: one test per top-level criterion, each printing a
single PASS/FAIL line.  Tolerances are pinned here and nowhere looser."""

import time
from fractions import Fraction

import numpy as np

from hhmaster.exactpoly import parse_polynomial
from hhmaster.flow import (
    commute_flows,
    compile_polynomial,
    integrate,
    invariant_drift,
    random_states,
    series_state,
)
from hhmaster.hamsys import (
    MASTER_VARS,
    build_case3_bundle,
    build_master_bundle,
    build_morphism,
    master_second_flow_printed,
    pullback_invariants,
    pushforward_check,
)
from hhmaster.poisson import (
    bracket,
    casimir_check,
    field_identity_mod_casimir,
    hamiltonian_vector_field,
    jacobi_check,
)
from hhmaster.puiseux import (
    compare_with_printed,
    eliminate_and_compare_curve,
    invariant_restriction,
    ode_residual,
    principal_expansion,
)

CASE3 = build_case3_bundle()
MASTER = build_master_bundle()
SEED = 20260825


def report(capsys, name, ok, start, limit):
    elapsed = time.monotonic() - start
    status = "PASS" if ok and elapsed < limit else "FAIL"
    # lift pytest's capture so the one-line-per-criterion report always
    # reaches the terminal
    with capsys.disabled():
        print(f"[{status}] {name} ({elapsed:.2f}s < {limit:.0f}s)")
    assert ok, name
    assert elapsed < limit, f"{name}: runtime budget exceeded"


def test_criterion_1_symbolic_conservation(capsys):
    start = time.monotonic()
    ok = all(
        CASE3.field.lie_derivative(inv).is_zero() for _, inv in CASE3.invariants
    ) and all(
        MASTER.field.lie_derivative(inv).is_zero() for _, inv in MASTER.invariants
    )
    report(capsys, "1 symbolic conservation (both systems, A symbolic)", ok, start, 5)


def test_criterion_2_poisson_structure(capsys):
    start = time.monotonic()
    ok = bracket(CASE3.invariant("H1"), CASE3.invariant("H2"), CASE3.poisson).is_zero()
    ok = ok and bracket(
        MASTER.invariant("F1"), MASTER.invariant("F2"), MASTER.poisson
    ).is_zero()
    ok = ok and casimir_check(MASTER.invariant("F3"), MASTER.poisson)
    jac = jacobi_check(MASTER.poisson)
    ok = ok and jac.passed and len(jac.triples) == 10

    # mutation controls must fail
    from hhmaster.hamsys import PoissonStructure, master_poisson

    rows = [list(r) for r in master_poisson().matrix]
    bad = parse_polynomial("2*z2", MASTER_VARS)
    rows[0][3], rows[3][0] = bad, -bad
    mutated = PoissonStructure(
        MASTER_VARS, MASTER.poisson.phase_vars, tuple(tuple(r) for r in rows)
    )
    ok = ok and not jacobi_check(mutated).passed
    broken = MASTER.invariant("F1") + parse_polynomial("1/100*z1*z2", MASTER_VARS)
    ok = ok and not MASTER.field.lie_derivative(broken).is_zero()
    report(capsys, "2 Poisson structure + Jacobi + Casimir + mutation controls", ok, start, 10)


def test_criterion_3_morphism(capsys):
    start = time.monotonic()
    phi = build_morphism()
    ok = all(r.is_zero() for r in pushforward_check(CASE3.field, phi, MASTER.field))
    ok = ok and all(diff.is_zero() for _, _, diff in pullback_invariants(phi))
    report(capsys, "3 morphism pushforward + pullback identities", ok, start, 5)


def test_criterion_4_second_flow_mod_casimir(capsys):
    start = time.monotonic()
    generated = hamiltonian_vector_field(MASTER.invariant("F2"), MASTER.poisson)
    records = field_identity_mod_casimir(
        master_second_flow_printed(), generated, MASTER.invariant("F3")
    )
    ok = all(rem.is_zero() for _, _, rem in records)
    report(capsys, "4 printed second flow = J grad F2 modulo the Casimir", ok, start, 5)


def test_criterion_5_painleve_suite(capsys):
    start = time.monotonic()
    expansion = principal_expansion(CASE3.field, 12)
    bal = expansion.balance
    ok = bal.exponents() == (
        Fraction(-1, 2),
        Fraction(-2),
        Fraction(-3, 2),
        Fraction(-3),
    )
    expected = ["alpha", "-3/8", "-1/2*alpha", "3/4"]
    ok = ok and all(
        lead == parse_polynomial(text, bal.ring)
        for lead, text in zip(bal.leading, expected)
    )
    # three free parameters beyond the pole position t0
    ok = ok and expansion.resonances.total_parameters_including_shift == 4
    residual = ode_residual(CASE3.field, expansion)
    ok = ok and all(s.is_zero() for s in residual.values())
    for y, x in (("y1", "x1"), ("y2", "x2")):
        diff = expansion.series[y].derivative() - expansion.series[x]
        ok = ok and all(c.is_zero() for c in diff.coeffs.values())
    report(capsys, "5 Painleve suite: balance, 3 free parameters, exact residual", ok, start, 60)


def test_criterion_6_residue_relations_and_curve(capsys):
    start = time.monotonic()
    expansion = principal_expansion(CASE3.field, 12)
    r1 = invariant_restriction(expansion, CASE3.invariant("H1"))
    r2 = invariant_restriction(expansion, CASE3.invariant("H2"))
    relation = eliminate_and_compare_curve(r1, r2, eliminate="gamma")
    ok = relation.back_substitution_zero
    ok = ok and relation.curve.degree_in("beta") == 3
    table = {mono: (d, p) for mono, d, p in relation.comparison}
    ok = ok and "alpha^1*beta^3" in table
    with capsys.disabled():
        print()
        print("  monomial-diff report vs printed curve (informational):")
        for mono, derived, printed in relation.comparison:
            marker = "  " if derived == printed else "!="
            print(f"    {marker} {mono}: derived {derived}, printed {printed}")
    report(capsys, "6 residue relations, cubic-in-beta curve, exact back-substitution",
           ok, start, 60)


def test_criterion_7_numerical_conservation(capsys):
    start = time.monotonic()
    params = {"A": Fraction(1)}
    ok = True
    for bundle, dim, scale in ((CASE3, 4, 0.5), (MASTER, 5, 0.3)):
        for y0 in random_states(dim, 10, seed=SEED, scale=scale):
            traj = integrate(bundle.field, y0, (0.0, 10.0), params)
            ok = ok and traj.ok
            ok = ok and max(invariant_drift(bundle, traj, params).values()) <= 1e-8
    report(capsys, "7 invariant drift <= 1e-8 over [0,10], 10 seeded ICs per system",
           ok, start, 30)


def test_criterion_8_flow_commutation(capsys):
    start = time.monotonic()
    params = {"A": Fraction(1)}
    ok = True
    for bundle, dim, scale in ((CASE3, 4, 0.5), (MASTER, 5, 0.3)):
        for y0 in random_states(dim, 5, seed=SEED, scale=scale):
            ok = ok and commute_flows(bundle, y0, 0.05, 0.05, params) <= 1e-6
    report(capsys, "8 H1/H2 and F1/F2 flows commute to 1e-6 at t=s=0.05", ok, start, 30)


def test_criterion_9_series_flow_cross_validation(capsys):
    start = time.monotonic()
    expansion = principal_expansion(CASE3.field, 12)
    values = {"A": 0.5, "alpha": 0.3, "beta": 0.2, "gamma": 0.1}
    params = {"A": Fraction(1, 2)}
    t0, dt = 0.01, 0.005
    u0, _ = series_state(expansion, t0, values)
    traj = integrate(CASE3.field, u0, (t0, t0 + dt), params)
    u1, _ = series_state(expansion, t0 + dt, values)
    rel = np.max(np.abs(traj.final_state - u1) / np.maximum(1.0, np.abs(u1)))
    ok = traj.ok and rel <= 1e-6

    phi = build_morphism()
    f3 = compile_polynomial(MASTER.invariant("F3"), MASTER.field.phase_vars, params)
    worst = max(
        abs(f3(np.array([float(v) for v in phi.evaluate(y)]))) for y in traj.states
    )
    ok = ok and worst <= 1e-9
    report(capsys, "9 series seeds flow to 1e-6; F3 vanishes to 1e-9 along phi(u)",
           ok, start, 10)
