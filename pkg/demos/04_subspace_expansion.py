"""Closing the forging rank gap with quantum subspace expansion.

At Schmidt rank 2 the forged ansatz cannot represent the chain4 ground
state, leaving a sizable variational gap.  Diagonalizing the
Hamiltonian in the space spanned by single and double excitations
applied to the forged state recovers the missing correlation almost
exactly.  With finite shots the generalized eigenproblem needs an
overlap cutoff; the sampled route picks one automatically and the
energy spread tightens as the budget grows.
"""

from pathlib import Path

import numpy as np

from forgechem.circuits import brick_wall_layout
from forgechem.forging import ForgedAnsatz, select_bitstrings, vqe_minimize
from forgechem.hamiltonian import parse_fcidump
from forgechem.operators import spin_factorize
from forgechem.oracle import fci_ground_state
from forgechem.qse import StateSource, build_excitations, ef_qse_energy

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def main():
    ham = parse_fcidump(FIXTURES / "chain4.fcidump")
    floor = float(fci_ground_state(ham)[0][0])
    bitstrings, lambdas0 = select_bitstrings(ham, 2)
    ansatz = ForgedAnsatz(brick_wall_layout(4), bitstrings)
    result = vqe_minimize(
        ansatz, spin_factorize(ham), lambdas0=lambdas0, seed=0, restarts=1)

    basis = build_excitations(ham.n_orbitals, ham.n_alpha, ham.n_beta)
    print(f"chain4, Schmidt rank 2, {len(basis.operators)} expansion operators")
    print(f"  E(FCI)     = {floor:+.10f}")
    print(f"  E(EF)      = {result.energy:+.10f}   gap {result.energy - floor:.2e}")

    outcome = ef_qse_energy(ansatz, ham, result.thetas, result.lambdas)
    print(f"  E(EF+QSE)  = {outcome.energy:+.10f}   gap {outcome.energy - floor:.2e}")
    print(f"  retained generalized-eigenproblem rank: "
          f"{outcome.solution.retained_rank} of {len(basis.operators)}")

    print("\nsampled expansion matrices, 8 seeds per budget:")
    for shots in (512, 4096, 32768):
        energies = []
        fallbacks = 0
        for seed in range(8):
            sampled = ef_qse_energy(
                ansatz, ham, result.thetas, result.lambdas,
                source=StateSource.sampled(shots, seed))
            energies.append(sampled.energy)
            fallbacks += int(sampled.used_fallback)
        energies = np.array(energies)
        print(f"  {shots:6d} shots: mean gap {np.mean(energies) - floor:+.2e}, "
              f"std {np.std(energies, ddof=1):.2e}, fallbacks {fallbacks}")


if __name__ == "__main__":
    main()
