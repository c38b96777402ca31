"""Qubit operators for one spin sector and the spin factorization H = sum A x B.

Each spin sector of an N-orbital Hamiltonian maps onto its own N-qubit
register: orbital p of the sector is qubit p, with occupation encoded in
the computational basis.  The fermionic operators are Jordan-Wigner
mapped inside the sector only; because every term of a spin-summed
Hamiltonian contains an even number of operators per sector, no parity
string ever crosses between the registers and the Hamiltonian
factorizes exactly into tensor products of sector operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ValidationError
from .hamiltonian import ActiveSpaceHamiltonian
from .pauli import PauliSum


def annihilation_sum(p: int, n_qubits: int) -> PauliSum:
    """Jordan-Wigner image of a_p on one sector register."""
    if not 0 <= p < n_qubits:
        raise ValidationError("orbital index out of range")
    bit = 1 << (n_qubits - 1 - p)
    z_string = sum(1 << (n_qubits - 1 - j) for j in range(p))
    # |0><1|_p = (X + iY)/2, with the parity string on lower orbitals
    return PauliSum(n_qubits, {
        (bit, z_string): 0.5,
        (bit, z_string | bit): 0.5j,
    })


def creation_sum(p: int, n_qubits: int) -> PauliSum:
    return annihilation_sum(p, n_qubits).dagger()


def excitation_sum(p: int, q: int, n_qubits: int) -> PauliSum:
    """E_pq = a_p^dagger a_q as a sector Pauli sum."""
    return creation_sum(p, n_qubits) * annihilation_sum(q, n_qubits)


def _accumulate(dest: dict, sum_: PauliSum, scale: complex):
    for key, coeff in sum_.terms.items():
        dest[key] = dest.get(key, 0.0) + scale * coeff


def sector_hamiltonian_sum(ham: ActiveSpaceHamiltonian) -> PauliSum:
    """Same-spin part of H for one sector:

        sum_pq g_pq E_pq + 1/2 sum_pqrs (pq|rs) E_pq E_rs,

    with g = h1 - 1/2 sum_t (pt|tq).  Shared by both spins because the
    integrals are spin-free.
    """
    n = ham.n_orbitals
    g = ham.h1 - 0.5 * np.einsum("pttq->pq", ham.h2)
    singles = [[excitation_sum(p, q, n) for q in range(n)] for p in range(n)]
    accum: dict[tuple[int, int], complex] = {}
    for p in range(n):
        for q in range(n):
            if abs(g[p, q]) > 1e-14:
                _accumulate(accum, singles[p][q], g[p, q])
    for p in range(n):
        for q in range(n):
            pq = singles[p][q]
            for r in range(n):
                for s in range(n):
                    coeff = 0.5 * ham.h2[p, q, r, s]
                    if abs(coeff) > 1e-14:
                        _accumulate(accum, pq * singles[r][s], coeff)
    return PauliSum(n, accum)


@dataclass(frozen=True)
class SpinFactorizedHamiltonian:
    """H = sum_mu coeff_mu * A_mu (x) B_mu + e_core over two N-qubit registers.

    Terms come in three groups: the alpha-only sector Hamiltonian
    (B = identity), the beta-only one (A = identity), and one hermitian
    cross term per symmetry-unique orbital pair (p <= q).
    """

    n_qubits: int
    terms: tuple[tuple[PauliSum, PauliSum, float], ...]
    e_core: float

    @property
    def n_cross_terms(self) -> int:
        return sum(1 for a, b, _ in self.terms if not a.is_identity() and not b.is_identity())

    def reassemble(self) -> np.ndarray:
        """Dense 2N-qubit matrix, alpha register on the high bits."""
        if self.n_qubits > 6:
            raise CapacityError("reassembly beyond 6 qubits per sector")
        dim = 1 << (2 * self.n_qubits)
        total = np.zeros((dim, dim), dtype=complex)
        for a_mu, b_mu, coeff in self.terms:
            total += coeff * np.kron(a_mu.to_matrix(), b_mu.to_matrix())
        total += self.e_core * np.eye(dim)
        return total


def spin_factorize(ham: ActiveSpaceHamiltonian) -> SpinFactorizedHamiltonian:
    """Factorize H into sector tensor products.

    The cross (alpha-beta) repulsion sum_pqrs (pq|rs) E_pq^a E_rs^b is
    grouped by the alpha pair: for p < q the hermitian combination
    E_pq + E_qp pairs with B_pq = sum_rs (pq|rs) E_rs, and the diagonal
    p = q pairs the number operator with B_pp.  That caps the cross-term
    count at N(N+1)/2.
    """
    n = ham.n_orbitals
    identity = PauliSum.identity(n)
    same_spin = sector_hamiltonian_sum(ham)
    terms: list[tuple[PauliSum, PauliSum, float]] = [
        (same_spin, identity, 1.0),
        (identity, same_spin, 1.0),
    ]
    singles = [[excitation_sum(p, q, n) for q in range(n)] for p in range(n)]
    for p in range(n):
        for q in range(p, n):
            accum: dict[tuple[int, int], complex] = {}
            for r in range(n):
                for s in range(n):
                    if abs(ham.h2[p, q, r, s]) > 1e-14:
                        _accumulate(accum, singles[r][s], ham.h2[p, q, r, s])
            b_sum = PauliSum(n, accum)
            if b_sum.n_terms == 0:
                continue
            a_sum = singles[p][q] if p == q else singles[p][q] + singles[q][p]
            terms.append((a_sum, b_sum, 1.0))
    return SpinFactorizedHamiltonian(n, tuple(terms), ham.e_core)
