"""Parse bundled integrals and diagonalize them exactly.

The FCI oracle is the ground truth every other estimate in this package
is scored against.  This script walks the bundled systems, prints their
ground and first excited energies, and inspects the ground-state CI
vector of the shortest hydrogen chain.
"""

from pathlib import Path

import numpy as np

from forgechem.determinants import one_particle_rdm
from forgechem.hamiltonian import parse_fcidump
from forgechem.oracle import fci_ground_state

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def main():
    for name in ("h2_molecule", "chain4", "chain6", "layered4"):
        ham = parse_fcidump(FIXTURES / f"{name}.fcidump")
        energies, states = fci_ground_state(ham, n_states=2)
        print(f"{name}: {ham.n_orbitals} orbitals, "
              f"({ham.n_alpha}a, {ham.n_beta}b) electrons")
        print(f"  E0 = {energies[0]:+.10f}   E1 = {energies[1]:+.10f}   "
              f"gap = {energies[1] - energies[0]:.6f}")

    ham = parse_fcidump(FIXTURES / "chain4.fcidump")
    energies, states = fci_ground_state(ham)
    ground = states[0]
    mask_a, mask_b = ground.dominant_determinant()
    print("\nchain4 ground state:")
    print(f"  dominant determinant: alpha={mask_a:04b} beta={mask_b:04b}")
    print(f"  weight of dominant determinant: "
          f"{abs(ground.amplitudes).max() ** 2:.4f}")
    gamma = one_particle_rdm(ground)
    print(f"  natural occupations: "
          f"{np.round(np.sort(np.linalg.eigvalsh(gamma))[::-1], 4)}")
    print(f"  trace of the 1-RDM (electron count): {np.trace(gamma):.6f}")
    print(f"  Rayleigh quotient check: {ground.energy(ham):+.10f}")


if __name__ == "__main__":
    main()
