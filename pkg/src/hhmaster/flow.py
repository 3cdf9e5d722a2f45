"""Numerical integration of the polynomial Hamiltonian flows.

An embedded Dormand-Prince 5(4) pair with PI step-size control integrates
fields compiled from exact polynomials (parameters are folded into the
monomial coefficients exactly before conversion to float).  Invariant drift
along trajectories is the numerical conservation check; flow commutation and
series seeding connect the integrator to the symbolic layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactpoly import Polynomial
from .hamsys import SystemBundle, VectorField

__all__ = [
    "IntegrationOptions",
    "Trajectory",
    "BlowUpError",
    "compile_polynomial",
    "compile_field",
    "integrate",
    "invariant_values",
    "invariant_drift",
    "commute_flows",
    "series_state",
    "random_states",
    "trajectory_csv",
    "write_csv",
]


class BlowUpError(RuntimeError):
    """Raised on request when a trajectory exceeds the blow-up threshold."""


@dataclass(frozen=True)
class IntegrationOptions:
    rtol: float = 1e-12
    atol: float = 1e-14
    initial_step: float | None = None
    max_step: float = math.inf
    max_steps: int = 1_000_000
    blowup_threshold: float = 1e12
    fixed_step: float | None = None


@dataclass
class Trajectory:
    """Accepted integration nodes; ``states[k]`` is the state at ``times[k]``.

    ``status`` is "ok", "blow-up", "step-underflow" or "max-steps"; on any
    non-ok status the trajectory ends at the last completed step.
    """

    times: np.ndarray
    states: np.ndarray
    status: str = "ok"
    steps_accepted: int = 0
    steps_rejected: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _param_values(params: dict[str, object]) -> dict[str, Fraction]:
    out = {}
    for k, v in params.items():
        out[k] = v if isinstance(v, Fraction) else Fraction(str(v))
    return out


def compile_polynomial(p: Polynomial, phase_vars: tuple[str, ...], params: dict[str, object]):
    """Compile a polynomial into a float-valued function of the state vector.

    Parameter variables must all be assigned in ``params``; their powers are
    folded into each monomial coefficient with exact rational arithmetic.
    """
    values = _param_values(params)
    phase_idx = [p.vars.index(v) for v in phase_vars]
    param_pos = []
    for i, v in enumerate(p.vars):
        if v in phase_vars:
            continue
        if v not in values:
            raise ValueError(f"missing value for parameter {v!r}")
        param_pos.append((i, values[v]))
    terms = []
    for exp, c in p.terms.items():
        coeff = c
        for i, val in param_pos:
            if exp[i]:
                coeff = coeff * val ** exp[i]
        if coeff == 0:
            continue
        mono = tuple(exp[i] for i in phase_idx)
        terms.append((float(coeff), mono))

    def func(y):
        total = 0.0
        for coeff, mono in terms:
            v = coeff
            for j, e in enumerate(mono):
                if e:
                    v *= y[j] ** e
            total += v
        return total

    return func


def compile_field(field: VectorField, params: dict[str, object]):
    """Compile a vector field into f(t, y) -> ndarray."""
    comps = [compile_polynomial(c, field.phase_vars, params) for c in field.components]

    def f(t, y):
        return np.array([c(y) for c in comps])

    return f


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)


def _dp_step(f, t, y, h):
    """One Dormand-Prince step: returns (y5, error_vector)."""
    k = [f(t, y)]
    for i in range(1, 7):
        yi = y + h * sum(a * kk for a, kk in zip(_DP_A[i], k))
        k.append(f(t + _DP_C[i] * h, yi))
    y5 = y + h * sum(b * kk for b, kk in zip(_DP_B5, k))
    y4 = y + h * sum(b * kk for b, kk in zip(_DP_B4, k))
    return y5, y5 - y4


def _initial_step(f, t0, y0, rtol, atol, direction):
    d0 = np.linalg.norm(y0 / (atol + rtol * np.abs(y0)))
    f0 = f(t0, y0)
    d1 = np.linalg.norm(f0 / (atol + rtol * np.abs(y0)))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return direction * min(h, 0.1)


def integrate(
    field_or_func,
    y0,
    t_span: tuple[float, float],
    params: dict[str, object] | None = None,
    options: IntegrationOptions = IntegrationOptions(),
    raise_on_blowup: bool = False,
) -> Trajectory:
    """Integrate from t_span[0] to t_span[1] (either direction).

    ``field_or_func`` is a VectorField (compiled with ``params``) or an
    already-compiled f(t, y).  The final accepted node lands exactly on the
    end time unless the integration stops early.
    """
    if isinstance(field_or_func, VectorField):
        f = compile_field(field_or_func, params or {})
    else:
        f = field_or_func
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.asarray(y0, dtype=float).copy()
    direction = 1.0 if t1 >= t0 else -1.0
    times = [t0]
    states = [y.copy()]
    status = "ok"
    accepted = rejected = 0

    if t1 == t0:
        return Trajectory(np.array(times), np.array(states), status, accepted, rejected)

    if options.fixed_step is not None:
        h = direction * abs(options.fixed_step)
        t = t0
        while (t1 - t) * direction > 1e-15 * max(1.0, abs(t1)):
            if abs(t1 - t) < abs(h):
                h = t1 - t
            y, _ = _dp_step(f, t, y, h)
            t = t + h
            accepted += 1
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > options.blowup_threshold:
                status = "blow-up"
                times.append(t)
                states.append(y.copy())
                break
            times.append(t)
            states.append(y.copy())
            if accepted >= options.max_steps:
                if (t1 - t) * direction > 1e-15 * max(1.0, abs(t1)):
                    status = "max-steps"
                break
        if status == "blow-up" and raise_on_blowup:
            raise BlowUpError(f"state exceeded {options.blowup_threshold:g} at t = {t:g}")
        return Trajectory(np.array(times), np.array(states), status, accepted, rejected)

    rtol, atol = options.rtol, options.atol
    h = options.initial_step
    if h is None:
        h = _initial_step(f, t0, y, rtol, atol, direction)
    else:
        h = direction * abs(h)
    h = direction * min(abs(h), options.max_step, abs(t1 - t0))
    t = t0
    err_prev = 1.0
    min_h = 1e-14 * max(abs(t0), abs(t1), 1.0)
    while (t1 - t) * direction > 1e-15 * max(1.0, abs(t1)):
        if accepted + rejected >= options.max_steps:
            status = "max-steps"
            break
        if abs(h) < min_h:
            status = "step-underflow"
            break
        clipped = False
        if (t + h - t1) * direction > 0:
            h = t1 - t
            clipped = True
        y_new, err_vec = _dp_step(f, t, y, h)
        if not np.all(np.isfinite(y_new)):
            rejected += 1
            h *= 0.5
            continue
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t = t + h
            y = y_new
            times.append(t)
            states.append(y.copy())
            accepted += 1
            if np.max(np.abs(y)) > options.blowup_threshold:
                status = "blow-up"
                break
            # PI step controller: fifth-order exponent with a damping term
            e = max(err, 1e-10)
            factor = 0.9 * e ** (-0.2) * max(err_prev, 1e-10) ** 0.04
            factor = min(5.0, max(0.2, factor))
            err_prev = e
            if not clipped:
                h = direction * min(abs(h) * factor, options.max_step)
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err ** (-0.2))
            h = h * factor
    if status == "blow-up" and raise_on_blowup:
        raise BlowUpError(f"state exceeded {options.blowup_threshold:g} at t = {t:g}")
    return Trajectory(np.array(times), np.array(states), status, accepted, rejected)


def invariant_values(
    bundle: SystemBundle, trajectory: Trajectory, params: dict[str, object]
) -> dict[str, np.ndarray]:
    """Each invariant evaluated along the trajectory."""
    out = {}
    for name, poly in bundle.invariants:
        g = compile_polynomial(poly, bundle.field.phase_vars, params)
        out[name] = np.array([g(y) for y in trajectory.states])
    return out


def invariant_drift(
    bundle: SystemBundle, trajectory: Trajectory, params: dict[str, object]
) -> dict[str, float]:
    """Max relative drift |I(t) - I(0)| / max(1, |I(0)|) per invariant."""
    out = {}
    for name, vals in invariant_values(bundle, trajectory, params).items():
        ref = vals[0]
        out[name] = float(np.max(np.abs(vals - ref)) / max(1.0, abs(ref)))
    return out


def commute_flows(
    bundle: SystemBundle,
    y0,
    t: float,
    s: float,
    params: dict[str, object],
    second_field: VectorField | None = None,
    options: IntegrationOptions = IntegrationOptions(),
) -> float:
    """Residual max|Phi_X^t Phi_Y^s (y0) - Phi_Y^s Phi_X^t (y0)|.

    X is the bundle's own field; Y defaults to the Hamiltonian field of the
    second invariant under the bundle's Poisson structure.
    """
    from .poisson import hamiltonian_vector_field

    x_field = bundle.field
    if second_field is None:
        second_name = bundle.invariants[1][0]
        second_field = hamiltonian_vector_field(
            bundle.invariant(second_name), bundle.poisson
        )
    fx = compile_field(x_field, params)
    fy = compile_field(second_field, params)
    a = integrate(fx, y0, (0.0, t), options=options)
    a = integrate(fy, a.final_state, (0.0, s), options=options)
    b = integrate(fy, y0, (0.0, s), options=options)
    b = integrate(fx, b.final_state, (0.0, t), options=options)
    if not (a.ok and b.ok):
        raise RuntimeError(f"flow composition failed: {a.status}, {b.status}")
    return float(np.max(np.abs(a.final_state - b.final_state)))


def series_state(expansion, t: float, params: dict[str, object]):
    """Evaluate a series expansion at time t.

    Returns (state vector in phase order, tail estimate).  The tail estimate
    is the largest magnitude of the final retained term across components and
    bounds the usefulness of the truncation at this t.  Free constants absent
    from ``params`` default to zero.
    """
    phase = expansion.balance.phase_vars
    values = {k: float(v) for k, v in params.items()}
    for name in expansion.balance.ring:
        values.setdefault(name, 0.0)
    state = []
    tail = 0.0
    for v in phase:
        s = expansion.series[v]
        state.append(s.evaluate(t, values))
        if s.coeffs:
            e_last = max(s.coeffs)
            c = s.coeffs[e_last]
            tail = max(tail, abs(float(c.evaluate(values))) * t ** (e_last / 2))
    return np.array(state), tail


def random_states(dim: int, count: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """Fixed-seed sample of bounded states in [-scale, scale]^dim."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, size=(count, dim))


def trajectory_csv(
    trajectory: Trajectory,
    state_names: tuple[str, ...],
    invariants: dict[str, np.ndarray] | None = None,
) -> str:
    """CSV text: header t,<state cols>,<invariant cols>; 17 significant digits."""
    invariants = invariants or {}
    header = ["t", *state_names, *invariants.keys()]
    lines = [",".join(header)]
    for i, t in enumerate(trajectory.times):
        row = [f"{t:.17g}"]
        row.extend(f"{x:.17g}" for x in trajectory.states[i])
        row.extend(f"{vals[i]:.17g}" for vals in invariants.values())
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_csv(path, trajectory, state_names, invariants=None):
    with open(path, "w") as fh:
        fh.write(trajectory_csv(trajectory, state_names, invariants))
