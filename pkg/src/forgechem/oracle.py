"""Exact diagonalization over the sector determinant basis.

This is the reference every approximate energy in the package is
measured against, so it is built on the determinant route only and
never touches the qubit representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .determinants import CIVector, orbital_strings, sector_hamiltonian_matrix
from .errors import CapacityError, ValidationError
from .hamiltonian import ActiveSpaceHamiltonian

_DIM_CAP = 20000


@dataclass
class FCIOracle:
    """Sector-restricted dense Hamiltonian with eigenpairs on demand."""

    ham: ActiveSpaceHamiltonian
    _matrix: np.ndarray | None = field(default=None, repr=False)
    _eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        n_a = len(orbital_strings(self.ham.n_orbitals, self.ham.n_alpha))
        n_b = len(orbital_strings(self.ham.n_orbitals, self.ham.n_beta))
        if n_a * n_b > _DIM_CAP:
            raise CapacityError(f"sector dimension {n_a * n_b} exceeds {_DIM_CAP}")

    @property
    def matrix(self) -> np.ndarray:
        """Electronic Hamiltonian matrix (core energy not included)."""
        if self._matrix is None:
            self._matrix = sector_hamiltonian_matrix(self.ham)
        return self._matrix

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            values, vectors = np.linalg.eigh(self.matrix)
            self._eig = (values, vectors)
        return self._eig

    def ground_energy(self) -> float:
        values, _ = self.eigensystem()
        return float(values[0]) + self.ham.e_core

    def state(self, index: int) -> CIVector:
        values, vectors = self.eigensystem()
        if not 0 <= index < len(values):
            raise ValidationError("eigenstate index out of range")
        n_b = len(orbital_strings(self.ham.n_orbitals, self.ham.n_beta))
        amps = vectors[:, index].reshape(-1, n_b)
        ci = CIVector(self.ham.n_orbitals, self.ham.n_alpha, self.ham.n_beta, amps.astype(complex))
        return ci.fix_phase()

    def energy(self, index: int) -> float:
        values, _ = self.eigensystem()
        return float(values[index]) + self.ham.e_core


def fci_ground_state(ham: ActiveSpaceHamiltonian, n_states: int = 1) -> tuple[np.ndarray, list[CIVector]]:
    """Lowest n_states eigenpairs of the sector Hamiltonian.

    Energies include the core energy; each CI vector carries the
    deterministic phase convention (largest amplitude real positive).
    """
    oracle = FCIOracle(ham)
    values, _ = oracle.eigensystem()
    if n_states < 1 or n_states > len(values):
        raise ValidationError("invalid number of states requested")
    energies = values[:n_states] + ham.e_core
    return energies.copy(), [oracle.state(i) for i in range(n_states)]
