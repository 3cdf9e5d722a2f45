"""Painleve/Puiseux analysis: balances, resonances, series, residue
relations, and the blow-up curve, frozen against independently validated
values."""

from fractions import Fraction

import pytest

from hhmaster.exactpoly import parse_polynomial
from hhmaster.hamsys import build_case3_bundle, build_master_bundle
from hhmaster.puiseux import (
    ExpansionError,
    PolyFrac,
    compare_with_printed,
    eliminate_and_compare_curve,
    expand_solution,
    find_balances,
    invariant_restriction,
    kowalewski_exponents,
    ode_residual,
    principal_expansion,
    printed_curve,
    printed_residue_relations,
    substitute_series,
)

CASE3 = build_case3_bundle()
MASTER = build_master_bundle()


@pytest.fixture(scope="module")
def case3_expansion():
    return principal_expansion(CASE3.field, 12)


@pytest.fixture(scope="module")
def master_expansion():
    return principal_expansion(MASTER.field, 12)


def test_case3_unique_balance():
    balances = find_balances(CASE3.field)
    assert len(balances) == 1
    bal = balances[0]
    assert bal.exponents() == (
        Fraction(-1, 2),
        Fraction(-2),
        Fraction(-3, 2),
        Fraction(-3),
    )
    ring = bal.ring
    expected = ["alpha", "-3/8", "-1/2*alpha", "3/4"]
    for lead, text in zip(bal.leading, expected):
        assert lead == parse_polynomial(text, ring)
    assert bal.free_names == ("alpha",)


def test_case3_resonances():
    bal = find_balances(CASE3.field)[0]
    report = kowalewski_exponents(CASE3.field, bal)
    assert report.time_shift_present
    assert [(order, names) for order, names in report.entries] == [
        (Fraction(0), ("alpha",)),
        (Fraction(2), ("beta",)),
        (Fraction(6), ("gamma",)),
    ]
    assert report.total_parameters_including_shift == 4


def test_case3_expansion_residual_vanishes(case3_expansion):
    residual = ode_residual(CASE3.field, case3_expansion)
    for v, series in residual.items():
        assert series.is_zero(), v


def test_case3_x_series_are_time_derivatives(case3_expansion):
    s = case3_expansion.series
    for y, x in (("y1", "x1"), ("y2", "x2")):
        diff = s[y].derivative() - s[x]
        assert all(c.is_zero() for c in diff.coeffs.values())


def test_case3_printed_comparison_flags_two_coefficients(case3_expansion):
    records = compare_with_printed(case3_expansion.series)
    mismatches = {(var, e) for var, e, _, _, ok in records if not ok}
    assert mismatches == {("y1", Fraction(5, 2)), ("x1", Fraction(3, 2))}
    ring = case3_expansion.series["y1"].ring
    # the recomputed values (the print drops a cube on alpha)
    assert case3_expansion.series["y1"].coefficient(5) == parse_polynomial(
        "-1/18*alpha^3", ring
    )
    assert case3_expansion.series["x1"].coefficient(3) == parse_polynomial(
        "-5/36*alpha^3", ring
    )


def test_case3_gamma_enters_with_printed_signs(case3_expansion):
    ring = case3_expansion.series["y1"].ring
    assert case3_expansion.series["y2"].coefficient(8) == parse_polynomial(
        "-gamma", ring
    )
    assert case3_expansion.series["y1"].coefficient(3) == parse_polynomial(
        "beta", ring
    )


def test_case3_residue_relations(case3_expansion):
    r1 = invariant_restriction(case3_expansion, CASE3.invariant("H1"))
    r2 = invariant_restriction(case3_expansion, CASE3.invariant("H2"))
    ring = r1.vars
    assert r1 == parse_polynomial("5/32*alpha^4 + 4/3*A^3 - 21/4*gamma", ring)
    assert r2 == parse_polynomial(
        "29/108*alpha^8 + 16*A^2*alpha^3*beta - 14*alpha^4*gamma - 48*alpha*beta^3",
        ring,
    )


def test_case3_relations_differ_from_printed(case3_expansion):
    r1 = invariant_restriction(case3_expansion, CASE3.invariant("H1"))
    p1, _ = printed_residue_relations()
    assert r1.rename(p1.vars) != p1


def test_curve_elimination(case3_expansion):
    r1 = invariant_restriction(case3_expansion, CASE3.invariant("H1"))
    r2 = invariant_restriction(case3_expansion, CASE3.invariant("H2"))
    relation = eliminate_and_compare_curve(r1, r2, eliminate="gamma")
    ring = relation.curve.vars
    assert relation.curve == parse_polynomial(
        "4/27*alpha^8 + 32/9*A^3*alpha^4 - 16*A^2*alpha^3*beta"
        " - 8/3*b1*alpha^4 + 48*alpha*beta^3 + b2",
        ring,
    )
    assert relation.back_substitution_zero
    assert relation.curve.degree_in("beta") == 3
    table = {mono: (d, p) for mono, d, p in relation.comparison}
    assert table["alpha^1*beta^3"] == (Fraction(48), Fraction(144))
    assert not relation.matches_printed


def test_curve_elimination_requires_linear_parameter(case3_expansion):
    from hhmaster.puiseux import EliminationError

    r1 = invariant_restriction(case3_expansion, CASE3.invariant("H1"))
    r2 = invariant_restriction(case3_expansion, CASE3.invariant("H2"))
    with pytest.raises(EliminationError):
        eliminate_and_compare_curve(r1, r2, eliminate="alpha")


def test_exact_rational_evaluation_oracle(case3_expansion):
    """Evaluate H1 on the truncated series at exact rational times: the
    defect against the residue relation must shrink like the truncation
    tail (roughly t^3 here), which certifies the series and the relation
    against each other without floats."""
    r1 = invariant_restriction(case3_expansion, CASE3.invariant("H1"))
    params = {"A": Fraction(1, 2), "alpha": Fraction(1, 3), "beta": Fraction(2, 5), "gamma": Fraction(1, 7)}
    params.update({v: Fraction(0) for v in r1.vars if v not in params})
    b1 = r1.evaluate(params)

    def h1_at(s: Fraction) -> Fraction:
        t = s * s
        state = {}
        for v, series in case3_expansion.series.items():
            total = Fraction(0)
            for e2, c in series.terms_sorted():
                total += c.evaluate(params) * s ** e2
            state[v] = total
        return CASE3.invariant("H1").evaluate({**state, "A": params["A"]})

    d1 = abs(h1_at(Fraction(1, 5)) - b1)
    d2 = abs(h1_at(Fraction(1, 10)) - b1)
    d3 = abs(h1_at(Fraction(1, 20)) - b1)
    # the truncation defect must die off like a power of t as t -> 0,
    # which pins the residue relation against the series exactly
    assert d1 / d2 > 3 and d2 / d3 > 3


def test_master_balances_and_principal(master_expansion):
    balances = find_balances(MASTER.field)
    assert len(balances) == 5
    consistent = []
    for bal in balances:
        try:
            expand_solution(MASTER.field, bal, 12)
            consistent.append(bal)
        except ExpansionError:
            pass
    assert len(consistent) == 1
    bal = master_expansion.balance
    assert bal.exponents() == (
        Fraction(-1),
        Fraction(-2),
        Fraction(-3),
        Fraction(-2),
        Fraction(-1),
    )
    ring = bal.ring
    expected = ["-2*alpha", "-3/8", "3/4", "alpha", "beta"]
    for lead, text in zip(bal.leading, expected):
        assert lead == parse_polynomial(text, ring)
    assert bal.free_names == ("alpha", "beta")


def test_master_free_parameter_count(master_expansion):
    report = master_expansion.resonances
    free = [n for _, names in report.entries for n in names]
    assert free == ["alpha", "beta", "gamma", "delta"]
    assert report.time_shift_present
    # four free parameters plus the pole position: five in total, the
    # dimension of the phase space
    assert report.total_parameters_including_shift == 5


def test_master_expansion_residual_vanishes(master_expansion):
    residual = ode_residual(MASTER.field, master_expansion)
    for v, series in residual.items():
        assert series.is_zero(), v


def test_master_coefficients_go_rational(master_expansion):
    # some deep coefficients genuinely divide by the leading free constant
    kinds = {
        type(c)
        for s in master_expansion.series.values()
        for c in s.coeffs.values()
    }
    assert PolyFrac in kinds


def test_master_casimir_restriction(master_expansion):
    c3 = invariant_restriction(master_expansion, MASTER.invariant("F3"))
    ring = c3.vars
    assert c3 == parse_polynomial(
        "12*A^2*alpha^2 + 8/3*A*alpha*beta - 24*alpha*gamma - 1/3*beta^2", ring
    )


def test_no_balance_above_cutoff():
    with pytest.raises(ExpansionError):
        balances = find_balances(CASE3.field, min_exponent=0)
        if not balances:
            raise ExpansionError("no balance found")


def test_substitute_series_matches_direct_evaluation(case3_expansion):
    # spot check: substituting the series into y1 * x2 agrees with the
    # product of the series
    ring = case3_expansion.series["y1"].ring
    p = parse_polynomial("y1*x2", CASE3.field.vars)
    left = substitute_series(p, CASE3.field.phase_vars, case3_expansion.series, ring)
    right = case3_expansion.series["y1"] * case3_expansion.series["x2"]
    diff = left - right
    assert all(c.is_zero() for c in diff.coeffs.values())
