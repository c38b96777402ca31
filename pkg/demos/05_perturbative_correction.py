"""Second-order correction for correlation outside the active window.

The layered4 system is solved in a 2-orbital active window cut from
the 4-orbital problem.  A Dyall-style zeroth-order Hamiltonian (exact
inside the window, generalized-Fock diagonal outside) turns the
leftover coupling into a sum over first-order terms.  The demo checks
the two structural limits: a trivial window gives exactly zero, and
scaling the coupling vector V|psi0> by lambda scales the correction
by lambda squared.
"""

from pathlib import Path

import numpy as np

from forgechem.hamiltonian import parse_fcidump, reduce_to_window
from forgechem.oracle import fci_ground_state
from forgechem.pt2 import (
    build_dyall,
    correction_from_spectrum,
    embed_in_full,
    pt2_correction,
)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
WINDOW = (1, 3)


def main():
    full = parse_fcidump(FIXTURES / "layered4.fcidump")
    active = reduce_to_window(full, WINDOW)
    e_full = float(fci_ground_state(full)[0][0])
    energies, states = fci_ground_state(active)
    e_active = float(energies[0])
    print(f"layered4: full FCI {e_full:+.10f}, "
          f"window {WINDOW} FCI {e_active:+.10f}")
    print(f"  energy missing from the window: {e_full - e_active:+.10f}")

    partition = build_dyall(full, WINDOW, states[0])
    reference = embed_in_full(states[0], full.n_orbitals, WINDOW).normalized()
    e0 = reference.energy(full)
    result = pt2_correction(partition, reference, e0)
    print(f"\nDyall partition: e0 = <ref|H|ref> = {e0:+.10f}")
    print(f"  delta(PT2) = {result.delta_e:+.10f}  over {result.n_terms} terms")
    print(f"  E0 + delta = {e0 + result.delta_e:+.10f}")
    print(f"  recovered {100 * result.delta_e / (e_full - e0):.1f}% "
          f"of the remaining gap")

    trivial_window = (0, full.n_orbitals)
    ground = fci_ground_state(full)[1][0]
    trivial = build_dyall(full, trivial_window, ground)
    zero = pt2_correction(trivial, ground, e_full)
    print(f"\ntrivial window {trivial_window}: delta = {zero.delta_e} "
          f"({zero.n_terms} terms)")

    vals, vecs = partition.dyall_eigensystem
    psi0_vec = reference.normalized().amplitudes.reshape(-1)
    v_psi0 = partition.residual_matrix() @ psi0_vec
    print("\ncoupling-strength scaling of the first-order sum:")
    for lam in (1.0, 0.5, 0.25):
        scaled = correction_from_spectrum(
            vals, vecs, lam * v_psi0, psi0_vec, e0)
        print(f"  lambda={lam:4.2f}: delta={scaled.delta_e:+.10f}  "
              f"ratio to lambda=1: {scaled.delta_e / result.delta_e:.6f}")


if __name__ == "__main__":
    main()
