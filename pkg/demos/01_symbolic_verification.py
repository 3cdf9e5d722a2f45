"""Walk through the exact symbolic verification of both systems.

Everything here is computed over the rationals with the parameter A left
symbolic: conservation of the invariants, the Poisson-geometric identities
(involution, Jacobi, Casimir), the morphism that maps the 4-dimensional
flow onto the 5-dimensional one, and the sense in which the stored second
flow of the big system is Hamiltonian "modulo the Casimir".

Run:  python3 demos/01_symbolic_verification.py
"""

from hhmaster.hamsys import (
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


def banner(text):
    print()
    print(text)
    print("-" * len(text))


def main():
    case3 = build_case3_bundle()
    master = build_master_bundle()

    banner("Conservation (exact, A symbolic)")
    for bundle in (case3, master):
        for name, inv in bundle.invariants:
            lie = bundle.field.lie_derivative(inv)
            print(f"  {bundle.name}: d{name}/dt = {lie.to_text() or '0'}")

    banner("Involution and Jacobi identity")
    h = bracket(case3.invariant("H1"), case3.invariant("H2"), case3.poisson)
    f = bracket(master.invariant("F1"), master.invariant("F2"), master.poisson)
    print(f"  {{H1, H2}} = {h.to_text() or '0'}")
    print(f"  {{F1, F2}} = {f.to_text() or '0'}")
    jac = jacobi_check(master.poisson)
    print(f"  Jacobi residuals on {len(jac.triples)} coordinate triples:"
          f" {'all zero' if jac.passed else 'NONZERO'}")

    banner("Casimir of the 5x5 structure")
    print(f"  J grad F3 == 0: {casimir_check(master.invariant('F3'), master.poisson)}")
    print(f"  J grad F1 == 0: {casimir_check(master.invariant('F1'), master.poisson)}"
          " (F1 generates the flow, so it must not be a Casimir)")

    banner("Morphism phi: 4-dim phase space -> 5-dim phase space")
    phi = build_morphism()
    residuals = pushforward_check(case3.field, phi, master.field)
    print(f"  d(phi)(field) - field o phi: "
          f"{'all components zero' if all(r.is_zero() for r in residuals) else 'NONZERO'}")
    for name, _, diff in pullback_invariants(phi):
        print(f"  pullback identity {name}: {diff.to_text() or '0'}")

    banner("Second flow of the big system, modulo the Casimir")
    generated = hamiltonian_vector_field(master.invariant("F2"), master.poisson)
    records = field_identity_mod_casimir(
        master_second_flow_printed(), generated, master.invariant("F3")
    )
    for i, diff, rem in records:
        tag = "0" if diff.is_zero() else f"({diff.to_text()})  [multiple of F3]"
        print(f"  component {i}: difference {tag}, remainder mod F3:"
              f" {rem.to_text() or '0'}")


if __name__ == "__main__":
    main()
