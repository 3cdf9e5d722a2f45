"""Numerical flows: accuracy, conservation, commutation, and the bridges to
the series and morphism layers."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hhmaster.flow import (
    IntegrationOptions,
    commute_flows,
    compile_polynomial,
    integrate,
    invariant_drift,
    invariant_values,
    random_states,
    series_state,
    trajectory_csv,
)
from hhmaster.hamsys import build_case3_bundle, build_master_bundle, build_morphism
from hhmaster.puiseux import principal_expansion

CASE3 = build_case3_bundle()
MASTER = build_master_bundle()
PARAMS = {"A": Fraction(1)}
SEED = 20260825


def test_equilibrium_stays_fixed():
    traj = integrate(CASE3.field, np.zeros(4), (0.0, 1.0), PARAMS)
    assert traj.ok
    assert np.max(np.abs(traj.states)) == 0.0


def test_invariant_drift_case3():
    for y0 in random_states(4, 10, seed=SEED, scale=0.5):
        traj = integrate(CASE3.field, y0, (0.0, 10.0), PARAMS)
        assert traj.ok
        drift = invariant_drift(CASE3, traj, PARAMS)
        assert max(drift.values()) <= 1e-8


def test_invariant_drift_master():
    for y0 in random_states(5, 10, seed=SEED, scale=0.3):
        traj = integrate(MASTER.field, y0, (0.0, 10.0), PARAMS)
        assert traj.ok
        drift = invariant_drift(MASTER, traj, PARAMS)
        assert max(drift.values()) <= 1e-8


def test_fixed_step_convergence_order():
    y0 = random_states(4, 1, seed=SEED, scale=0.5)[0]
    ref = integrate(CASE3.field, y0, (0.0, 1.0), PARAMS).final_state
    errors = []
    for h in (0.02, 0.01, 0.005):
        traj = integrate(
            CASE3.field, y0, (0.0, 1.0), PARAMS, IntegrationOptions(fixed_step=h)
        )
        errors.append(np.max(np.abs(traj.final_state - ref)))
    orders = [math.log(errors[i] / errors[i + 1], 2) for i in range(2)]
    assert min(orders) >= 5.0


def test_time_reversal():
    y0 = random_states(4, 1, seed=SEED, scale=0.5)[0]
    fwd = integrate(CASE3.field, y0, (0.0, 1.0), PARAMS)
    back = integrate(CASE3.field, fwd.final_state, (1.0, 0.0), PARAMS)
    assert np.max(np.abs(back.final_state - y0)) <= 10 * 1e-10


def test_commuting_flows():
    for y0 in random_states(4, 5, seed=SEED, scale=0.5):
        assert commute_flows(CASE3, y0, 0.05, 0.05, PARAMS) <= 1e-6
    for y0 in random_states(5, 5, seed=SEED, scale=0.3):
        assert commute_flows(MASTER, y0, 0.05, 0.05, PARAMS) <= 1e-6


def test_blowup_flag():
    traj = integrate(
        CASE3.field, np.array([0.0, -50.0, 0.0, 0.0]), (0.0, 10.0), PARAMS
    )
    assert traj.status == "blow-up"
    assert np.max(np.abs(traj.final_state)) > 1e12


@pytest.fixture(scope="module")
def case3_expansion():
    return principal_expansion(CASE3.field, 12)


def test_series_seeds_the_flow(case3_expansion):
    values = {"A": 0.5, "alpha": 0.3, "beta": 0.2, "gamma": 0.1}
    t0 = 0.01
    u0, tail = series_state(case3_expansion, t0, values)
    assert tail < 1e-5
    traj = integrate(CASE3.field, u0, (t0, t0 + 0.005), {"A": Fraction(1, 2)})
    u1, _ = series_state(case3_expansion, t0 + 0.005, values)
    rel = np.max(np.abs(traj.final_state - u1) / np.maximum(1.0, np.abs(u1)))
    assert rel <= 1e-6


def test_morphism_transport_annihilates_casimir(case3_expansion):
    values = {"A": 0.5, "alpha": 0.3, "beta": 0.2, "gamma": 0.1}
    u0, _ = series_state(case3_expansion, 0.01, values)
    traj = integrate(CASE3.field, u0, (0.01, 0.015), {"A": Fraction(1, 2)})
    phi = build_morphism()
    f3 = compile_polynomial(
        MASTER.invariant("F3"), MASTER.field.phase_vars, {"A": Fraction(1, 2)}
    )
    worst = max(
        abs(f3(np.array([float(v) for v in phi.evaluate(y)]))) for y in traj.states
    )
    assert worst <= 1e-9


def test_csv_format():
    traj = integrate(CASE3.field, np.array([0.1, 0.1, 0.0, 0.0]), (0.0, 0.1), PARAMS)
    inv = invariant_values(CASE3, traj, PARAMS)
    text = trajectory_csv(traj, CASE3.field.phase_vars, inv)
    lines = text.strip().splitlines()
    assert lines[0] == "t,y1,y2,x1,x2,H1,H2"
    assert all(len(line.split(",")) == 7 for line in lines[1:])
    # 17 significant digits survive a round trip
    value = float(lines[1].split(",")[1])
    assert value == traj.states[0][0]


def test_max_steps_flag():
    traj = integrate(
        CASE3.field,
        np.array([0.1, 0.1, 0.0, 0.0]),
        (0.0, 10.0),
        PARAMS,
        IntegrationOptions(max_steps=5),
    )
    assert traj.status == "max-steps"
