"""Command-line front end: verification, integration, series, curve, bracket.

Exit codes are a stable contract: 0 pass, 1 verification failure, 2 usage
error, 3 blow-up, 4 no balance, 5 elimination failure.  Reports are JSON with
sorted keys so identical configurations produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import flow, poisson, puiseux
from .exactpoly import Polynomial, parse_polynomial
from .hamsys import (
    BUNDLE_NAMES,
    GENERAL_VARS,
    build_morphism,
    case3_second_flow_printed,
    get_bundle,
    master_second_flow_printed,
    pullback_invariants,
    pushforward_check,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3
EXIT_NO_BALANCE = 4
EXIT_ELIMINATION = 5


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _check(checks: list, name: str, residuals) -> None:
    """Append a named check; residuals is an iterable of polynomials (or
    (label, polynomial) pairs) that must all be the zero polynomial."""
    failed = []
    for item in residuals:
        label, p = item if isinstance(item, tuple) else ("residual", item)
        if not p.is_zero():
            failed.append(f"{label}: {p.to_text()}")
    checks.append(
        {"name": name, "status": "fail" if failed else "pass", **({"residual": failed} if failed else {})}
    )


# -------------------------------------------------------------------------
# verify
# -------------------------------------------------------------------------


def _verify_general(checks: list, eps: Fraction, b_value: Fraction | None) -> None:
    bundle = get_bundle("hh-general")
    subs = {v: Polynomial.variable(GENERAL_VARS, v) for v in GENERAL_VARS}
    subs["eps"] = Polynomial.constant(GENERAL_VARS, eps)
    if b_value is None:
        # the integrable locus ties B to A
        subs["B"] = parse_polynomial("16*A", GENERAL_VARS)
    else:
        subs["B"] = Polynomial.constant(GENERAL_VARS, b_value)
    field = bundle.field
    for name, inv in bundle.invariants:
        lie = field.lie_derivative(inv).substitute(subs)
        _check(checks, f"conserved:{name}", [lie])
    h1 = bundle.invariant("H1").substitute(subs)
    h2 = bundle.invariant("H2").substitute(subs)
    _check(checks, "involution:{H1,H2}", [poisson.bracket(h1, h2, bundle.poisson)])


def _verify_case3(checks: list) -> None:
    bundle = get_bundle("hh-case3")
    for name, inv in bundle.invariants:
        _check(checks, f"conserved:{name}", [bundle.field.lie_derivative(inv)])
    h1 = bundle.invariant("H1")
    h2 = bundle.invariant("H2")
    _check(checks, "involution:{H1,H2}", [poisson.bracket(h1, h2, bundle.poisson)])
    ham_field = poisson.hamiltonian_vector_field(h1, bundle.poisson)
    _check(
        checks,
        "field-is-J-grad-H1",
        [
            (v, a - b)
            for v, a, b in zip(
                bundle.field.phase_vars, bundle.field.components, ham_field.components
            )
        ],
    )
    jac = poisson.jacobi_check(bundle.poisson)
    _check(checks, "jacobi:canonical", [(f"triple{t[:3]}", t[3]) for t in jac.triples])


def _verify_master(checks: list) -> None:
    bundle = get_bundle("master")
    for name, inv in bundle.invariants:
        _check(checks, f"conserved:{name}", [bundle.field.lie_derivative(inv)])
    f1 = bundle.invariant("F1")
    f2 = bundle.invariant("F2")
    f3 = bundle.invariant("F3")
    _check(checks, "involution:{F1,F2}", [poisson.bracket(f1, f2, bundle.poisson)])
    jac = poisson.jacobi_check(bundle.poisson)
    _check(checks, "jacobi:printed-structure", [(f"triple{t[:3]}", t[3]) for t in jac.triples])
    checks.append(
        {
            "name": "casimir:F3",
            "status": "pass" if poisson.casimir_check(f3, bundle.poisson) else "fail",
        }
    )
    ham_field = poisson.hamiltonian_vector_field(f1, bundle.poisson)
    _check(
        checks,
        "field-is-J-grad-F1",
        [
            (v, a - b)
            for v, a, b in zip(
                bundle.field.phase_vars, bundle.field.components, ham_field.components
            )
        ],
    )
    second = poisson.hamiltonian_vector_field(f2, bundle.poisson)
    printed = master_second_flow_printed()
    mod = poisson.field_identity_mod_casimir(printed, second, f3)
    _check(checks, "second-flow-mod-casimir", [(f"component{i}", rem) for i, _, rem in mod])
    # morphism suite
    phi = build_morphism()
    case3 = get_bundle("hh-case3")
    push = pushforward_check(case3.field, phi, bundle.field)
    _check(checks, "morphism:pushforward", [(f"component{i}", r) for i, r in enumerate(push)])
    pulls = pullback_invariants(phi)
    _check(checks, "morphism:pullback", [(name, diff) for name, _, diff in pulls])


def run_verify(args) -> int:
    system = args.system
    checks: list = []
    if system == "hh-general":
        _verify_general(checks, args.epsilon, args.B)
    elif system == "hh-case3":
        _verify_case3(checks)
    elif system == "master":
        _verify_master(checks)
    overall = all(c["status"] == "pass" for c in checks)
    report = {
        "command": "verify",
        "system": system,
        "checks": checks,
        "overall": "pass" if overall else "fail",
    }
    _emit(report, args.output)
    return EXIT_OK if overall else EXIT_VERIFY


# -------------------------------------------------------------------------
# integrate
# -------------------------------------------------------------------------


def _tolerance(flag_value, env_name, default):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(env_name)
    return float(env) if env else default


def run_integrate(args) -> int:
    bundle = get_bundle(args.system)
    dim = len(bundle.field.phase_vars)
    params = {"A": args.A}
    if args.system == "hh-general":
        params["eps"] = args.epsilon
        params["B"] = args.B if args.B is not None else 16 * args.A
    rtol = _tolerance(args.rtol, "HHMASTER_RTOL", 1e-12)
    atol = _tolerance(args.atol, "HHMASTER_ATOL", 1e-14)
    options = flow.IntegrationOptions(
        rtol=rtol, atol=atol, blowup_threshold=args.blowup_threshold
    )
    t0 = args.t0
    seed_report = {}
    if args.seed_from_series:
        free_values = {
            "alpha": args.alpha,
            "beta": args.beta,
            "gamma": args.gamma,
            "delta": args.delta,
        }
        try:
            expansion = puiseux.principal_expansion(bundle.field, args.order)
        except puiseux.ExpansionError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NO_BALANCE
        values = {"A": float(args.A), **free_values}
        u0, tail = flow.series_state(expansion, t0, values)
        seed_report = {"seed_tail_estimate": tail}
    elif args.u0 is not None:
        u0 = np.array([float(Fraction(x)) for x in args.u0.split(",")])
        if u0.shape[0] != dim:
            print(f"error: --u0 needs {dim} components for {args.system}", file=sys.stderr)
            return EXIT_USAGE
    else:
        print("error: provide --u0 or --seed-from-series", file=sys.stderr)
        return EXIT_USAGE
    trajectory = flow.integrate(
        bundle.field, u0, (t0, t0 + args.t), params, options
    )
    invariants = flow.invariant_values(bundle, trajectory, params)
    if args.csv:
        flow.write_csv(args.csv, trajectory, bundle.field.phase_vars, invariants)
    drift = {
        name: float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(vals[0])))
        for name, vals in invariants.items()
    }
    report = {
        "command": "integrate",
        "system": args.system,
        "status": trajectory.status,
        "steps_accepted": trajectory.steps_accepted,
        "steps_rejected": trajectory.steps_rejected,
        "t_final": float(trajectory.times[-1]),
        "final_state": [float(x) for x in trajectory.final_state],
        "drift": drift,
        "drift_threshold": args.drift_threshold,
        **seed_report,
    }
    _emit(report, args.output)
    if trajectory.status == "blow-up":
        return EXIT_BLOWUP
    if not trajectory.ok:
        return EXIT_VERIFY
    return EXIT_OK if max(drift.values()) <= args.drift_threshold else EXIT_VERIFY


# -------------------------------------------------------------------------
# series
# -------------------------------------------------------------------------


def _series_table(series) -> dict:
    return {
        var: {str(Fraction(e2, 2)): c.to_text() for e2, c in s.terms_sorted()}
        for var, s in series.items()
    }


def run_series(args) -> int:
    bundle = get_bundle(args.system)
    field = bundle.field
    try:
        balances = puiseux.find_balances(field, min_exponent=args.min_exponent)
    except puiseux.ExpansionError:
        balances = []
    if not balances:
        print("error: no balance found", file=sys.stderr)
        return EXIT_NO_BALANCE
    balance_block = [
        {
            "exponents": [str(e) for e in b.exponents()],
            "leading": [p.to_text() for p in b.leading],
            "free_names": list(b.free_names),
        }
        for b in balances
    ]
    try:
        result = puiseux.principal_expansion(field, args.order)
    except puiseux.ExpansionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_BALANCE
    residual = puiseux.ode_residual(field, result)
    resonances = result.resonances
    report = {
        "command": "series",
        "system": args.system,
        "balances": balance_block,
        "principal_balance": {
            "exponents": [str(e) for e in result.balance.exponents()],
            "leading": [p.to_text() for p in result.balance.leading],
        },
        "resonances": [
            {"order": str(order), "free_names": list(names)}
            for order, names in resonances.entries
        ],
        "time_shift_parameter": resonances.time_shift_present,
        "total_parameters_including_shift": resonances.total_parameters_including_shift,
        "series": _series_table(result.series),
        "ode_residual_zero": all(r.is_zero() for r in residual.values()),
    }
    if args.system == "hh-case3":
        records = puiseux.compare_with_printed(result.series)
        report["printed_diff"] = [
            {
                "variable": var,
                "exponent": str(e),
                "computed": comp.to_text(),
                "printed": printed.to_text(),
                "match": match,
            }
            for var, e, comp, printed, match in records
            if not match
        ]
    _emit(report, args.output)
    return EXIT_OK if report["ode_residual_zero"] else EXIT_VERIFY


# -------------------------------------------------------------------------
# curve
# -------------------------------------------------------------------------


def run_curve(args) -> int:
    if args.system != "hh-case3":
        print("error: the residue-relation curve is defined for hh-case3", file=sys.stderr)
        return EXIT_USAGE
    bundle = get_bundle(args.system)
    try:
        result = puiseux.principal_expansion(bundle.field, args.order)
        r1 = puiseux.invariant_restriction(result, bundle.invariant("H1"))
        r2 = puiseux.invariant_restriction(result, bundle.invariant("H2"))
        relation = puiseux.eliminate_and_compare_curve(r1, r2, eliminate=args.eliminate)
    except (puiseux.RestrictionError, puiseux.EliminationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ELIMINATION
    except puiseux.ExpansionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_BALANCE
    printed1, printed2 = puiseux.printed_residue_relations()
    report = {
        "command": "curve",
        "system": args.system,
        "residue_relation_H1": r1.to_text(),
        "residue_relation_H2": r2.to_text(),
        "printed_relation_H1": printed1.to_text(),
        "printed_relation_H2": printed2.to_text(),
        "curve": relation.curve.to_text(),
        "printed_curve": puiseux.printed_curve().to_text(),
        "beta_degree": relation.curve.degree_in("beta"),
        "back_substitution_zero": relation.back_substitution_zero,
        "matches_printed": relation.matches_printed,
        "monomial_table": [
            {"monomial": mono, "derived": str(d), "printed": str(p)}
            for mono, d, p in relation.comparison
        ],
    }
    _emit(report, args.output)
    return EXIT_OK


# -------------------------------------------------------------------------
# bracket
# -------------------------------------------------------------------------


def run_bracket(args) -> int:
    bundle = get_bundle(args.structure)
    try:
        f = parse_polynomial(args.f, bundle.field.vars)
        g = parse_polynomial(args.g, bundle.field.vars)
    except (ValueError, SyntaxError) as exc:
        print(f"error: cannot parse polynomial: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = poisson.bracket(f, g, bundle.poisson)
    report = {
        "command": "bracket",
        "structure": args.structure,
        "f": f.to_text(),
        "g": g.to_text(),
        "bracket": result.to_text(),
        "is_zero": result.is_zero(),
    }
    _emit(report, args.output)
    return EXIT_OK


# -------------------------------------------------------------------------
# argument plumbing
# -------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhmaster",
        description="Exact verification and simulation of two integrable Hamiltonian systems",
    )
    parser.add_argument("--config", help="JSON file of option defaults; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system_required=True):
        p.add_argument("--system", required=system_required, help="hh-general | hh-case3 | master")
        p.add_argument("--output", help="write the JSON report here instead of stdout")

    v = sub.add_parser("verify", help="run the symbolic verification suite")
    common(v)
    v.add_argument("--epsilon", type=_fraction, default=Fraction(16))
    v.add_argument("--B", type=_fraction, default=None)

    it = sub.add_parser("integrate", help="integrate a trajectory and report drift")
    common(it)
    it.add_argument("--A", type=_fraction, default=Fraction(1))
    it.add_argument("--epsilon", type=_fraction, default=Fraction(16))
    it.add_argument("--B", type=_fraction, default=None)
    it.add_argument("--u0", help="comma-separated initial state")
    it.add_argument("--t", type=float, required=True, help="integration time (signed)")
    it.add_argument("--t0", type=float, default=0.0)
    it.add_argument("--seed-from-series", action="store_true")
    it.add_argument("--alpha", type=float, default=0.0)
    it.add_argument("--beta", type=float, default=0.0)
    it.add_argument("--gamma", type=float, default=0.0)
    it.add_argument("--delta", type=float, default=0.0)
    it.add_argument("--order", type=int, default=12, help="series order for seeding (half-steps)")
    it.add_argument("--rtol", type=float, default=None)
    it.add_argument("--atol", type=float, default=None)
    it.add_argument("--drift-threshold", type=float, default=1e-8)
    it.add_argument("--blowup-threshold", type=float, default=1e12)
    it.add_argument("--csv", help="write the trajectory CSV here")

    se = sub.add_parser("series", help="Puiseux expansion with resonance report")
    common(se)
    se.add_argument("--order", type=int, default=12, help="half-steps beyond leading order")
    se.add_argument("--min-exponent", type=int, default=-3)

    cu = sub.add_parser("curve", help="residue relations and the blow-up curve")
    common(cu)
    cu.add_argument("--order", type=int, default=12)
    cu.add_argument("--eliminate", default="gamma")

    br = sub.add_parser("bracket", help="Poisson bracket of two polynomials")
    br.add_argument("--structure", required=True, help="hh-general | hh-case3 | master")
    br.add_argument("--output", help="write the JSON report here instead of stdout")
    br.add_argument("f")
    br.add_argument("g")
    return parser


def _apply_config(parser, args, argv) -> None:
    """Fill options from the JSON config file for keys not set on the
    command line (flags win)."""
    if not args.config:
        return
    with open(args.config) as fh:
        config = json.load(fh)
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in config.items():
        attr = key.replace("-", "_")
        if attr in given or not hasattr(args, attr):
            continue
        current = getattr(args, attr)
        default = parser.get_default(attr)
        if current == default:
            if attr in ("A", "epsilon", "B") and value is not None:
                value = Fraction(str(value))
            setattr(args, attr, value)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        _apply_config(parser, args, argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    needs_system = args.command != "bracket"
    name = args.system if needs_system else args.structure
    if name not in BUNDLE_NAMES:
        print(f"error: unknown system {name!r}; choose from {', '.join(BUNDLE_NAMES)}", file=sys.stderr)
        return EXIT_USAGE
    runner = {
        "verify": run_verify,
        "integrate": run_integrate,
        "series": run_series,
        "curve": run_curve,
        "bracket": run_bracket,
    }[args.command]
    return runner(args)


if __name__ == "__main__":
    sys.exit(main())
