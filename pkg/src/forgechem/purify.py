"""Purification of tomographic reconstructions into CI vectors.

A forged tomography run yields one density per diagonal preparation and
four per bitstring pair.  The phase-indexed combination

    T_lk = U|x_l><x_k|U^t = 1/2 sum_p (-i)^p rho_phi^p

recovers the cross transfer operators, and the two-register density

    rho = sum_kl lambda_k lambda_l T_kl (x) T_kl

reproduces |Psi><Psi| exactly in the shot-free limit.  With finite
shots rho stays hermitian with unit trace but is generally not positive;
projecting onto the particle-number sector and reading off the
reference row trades that noisy matrix for a single noisy CI vector,
which is the purification step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinants import (
    CIVector,
    bits_to_mask,
    fock_space_matrix,
    mask_to_axis_index,
    sector_hamiltonian_matrix,
)
from .errors import CapacityError, NumericalError, ValidationError
from .forging import ForgedAnsatz, normalized_schmidt
from .hamiltonian import ActiveSpaceHamiltonian
from .operators import SpinFactorizedHamiltonian
from .pauli import PauliSum
from .tomography import BlochVector, DensityMatrix, forged_tomography_sweep, reconstruct_density

_ROW_NORM_FLOOR = 1e-8
_ASSEMBLY_QUBIT_CAP = 10


def bloch_trace(bloch: BlochVector, operator: PauliSum) -> complex:
    """Tr[operator * rho] from tomographic Pauli estimates.

    Uses Tr[P P'] = 2^n delta_PP', so the trace is the coefficient-weighted
    sum of the operator's Bloch entries.
    """
    if operator.n_qubits != bloch.n_qubits:
        raise ValidationError("operator register width does not match")
    n = bloch.n_qubits
    total = 0.0 + 0.0j
    for (x_mask, z_mask), coeff in operator.terms.items():
        index = 0
        lookup = (0, 3, 1, 2)  # (x, z) bit pair -> IXYZ digit
        for p in range(n):
            shift = n - 1 - p
            pair = 2 * ((x_mask >> shift) & 1) + ((z_mask >> shift) & 1)
            index += lookup[pair] * 4 ** shift
        total += coeff * bloch.values[index]
    return total


def pair_labels(k: int, l: int, n_bitstrings: int) -> list[str]:
    if n_bitstrings == 2:
        return [f"phi{p}" for p in range(4)]
    return [f"phi{p}_{k}{l}" for p in range(4)]


def cross_transfer(blochs: dict[str, BlochVector], k: int, l: int, n_bitstrings: int) -> np.ndarray:
    """T_lk = U|x_l><x_k|U^t reconstructed from the four phi densities."""
    total = None
    for p, label in enumerate(pair_labels(k, l, n_bitstrings)):
        rho_p = reconstruct_density(blochs[label]).matrix
        term = 0.5 * (-1j) ** p * rho_p
        total = term if total is None else total + term
    return total


def assemble_forged_density(
    blochs: dict[str, BlochVector],
    ansatz: ForgedAnsatz,
    lambdas,
) -> DensityMatrix:
    """Two-register density sum_kl lambda_k lambda_l T_kl (x) T_kl."""
    n = ansatz.layout.n_qubits
    if 2 * n > _ASSEMBLY_QUBIT_CAP:
        raise CapacityError(f"density assembly beyond {_ASSEMBLY_QUBIT_CAP} total qubits")
    lam = normalized_schmidt(lambdas)
    k_total = ansatz.n_bitstrings
    total = np.zeros((1 << (2 * n), 1 << (2 * n)), dtype=complex)
    for k in range(k_total):
        rho_k = reconstruct_density(blochs[f"x{k}"]).matrix
        total += lam[k] ** 2 * np.kron(rho_k, rho_k)
    for k in range(k_total):
        for l in range(k + 1, k_total):
            t_lk = cross_transfer(blochs, k, l, k_total)
            t_kl = t_lk.conj().T
            total += lam[k] * lam[l] * (np.kron(t_kl, t_kl) + np.kron(t_lk, t_lk))
    return DensityMatrix(total)


def sector_selector(n_orbitals: int, n_alpha: int, n_beta: int) -> np.ndarray:
    """Boolean mask over the 2N-qubit basis for the particle sector."""
    indices = np.arange(1 << (2 * n_orbitals), dtype=np.int64)
    alpha = np.bitwise_count(indices >> n_orbitals)
    beta = np.bitwise_count(indices & ((1 << n_orbitals) - 1))
    return (alpha == n_alpha) & (beta == n_beta)


def project_sector(rho: DensityMatrix, n_orbitals: int, n_alpha: int, n_beta: int) -> DensityMatrix:
    """Zero all rows and columns outside the sector and renormalize."""
    if rho.n_qubits != 2 * n_orbitals:
        raise ValidationError("density register does not hold two sectors")
    keep = sector_selector(n_orbitals, n_alpha, n_beta)
    projected = rho.matrix * np.outer(keep, keep)
    trace = float(np.trace(projected).real)
    if trace < 1e-12:
        raise NumericalError("no weight left in the requested sector")
    return DensityMatrix(projected / trace)


def extract_ci_vector(
    rho: DensityMatrix,
    n_orbitals: int,
    n_alpha: int,
    n_beta: int,
    reference: tuple[int, int],
) -> tuple[CIVector, bool]:
    """Read the CI vector out of a sector-projected density.

    For rho = |psi><psi| the reference row is psi_ref * psi^dagger, so its
    conjugate is the ket up to normalization.  When the reference row has
    negligible norm the dominant eigenvector is used instead; the second
    return value reports that fallback.
    """
    ref_index = (mask_to_axis_index(reference[0], n_orbitals) << n_orbitals) | (
        mask_to_axis_index(reference[1], n_orbitals))
    row = rho.matrix[ref_index, :]
    used_fallback = False
    if np.linalg.norm(row) < _ROW_NORM_FLOOR:
        _, vectors = np.linalg.eigh(rho.matrix)
        ket = vectors[:, -1]
        used_fallback = True
    else:
        ket = np.conj(row)
    ci = CIVector.from_qubit_state(ket, n_orbitals, n_alpha, n_beta)
    if ci.norm() < 1e-12:
        raise NumericalError("extracted vector has no sector support")
    return ci.normalized().fix_phase(reference), used_fallback


def forged_row_ci_vector(
    blochs: dict[str, BlochVector],
    ansatz: ForgedAnsatz,
    lambdas,
    n_alpha: int,
    n_beta: int,
    reference: tuple[int, int],
) -> tuple[CIVector, bool]:
    """Reference-row CI extraction without materializing the 2N density.

    Row (a_ref, b_ref) of sum_kl lam_k lam_l T_kl (x) T_kl is the same
    lambda-weighted sum of row tensor products, which keeps the cost at
    K^2 sector-sized matrices.  No eigenvector fallback is available on
    this path.
    """
    n = ansatz.layout.n_qubits
    lam = normalized_schmidt(lambdas)
    a_ref = mask_to_axis_index(reference[0], n)
    b_ref = mask_to_axis_index(reference[1], n)
    k_total = ansatz.n_bitstrings
    row = np.zeros(1 << (2 * n), dtype=complex)
    for k in range(k_total):
        rho_k = reconstruct_density(blochs[f"x{k}"]).matrix
        row += lam[k] ** 2 * np.kron(rho_k[a_ref, :], rho_k[b_ref, :])
    for k in range(k_total):
        for l in range(k + 1, k_total):
            t_lk = cross_transfer(blochs, k, l, k_total)
            t_kl = t_lk.conj().T
            row += lam[k] * lam[l] * np.kron(t_kl[a_ref, :], t_kl[b_ref, :])
            row += lam[k] * lam[l] * np.kron(t_lk[a_ref, :], t_lk[b_ref, :])
    if np.linalg.norm(row) < _ROW_NORM_FLOOR:
        raise NumericalError("reference row has negligible norm")
    ci = CIVector.from_qubit_state(np.conj(row), n, n_alpha, n_beta)
    return ci.normalized().fix_phase(reference), False


def raw_forged_energy(
    blochs: dict[str, BlochVector],
    ansatz: ForgedAnsatz,
    factorized: SpinFactorizedHamiltonian,
    lambdas,
) -> float:
    """Tr[H rho] for the assembled density, evaluated term by term.

    Tr[(A x B) (T x T)] factorizes into Bloch-vector contractions, so
    this works at any register width without building rho.
    """
    lam = normalized_schmidt(lambdas)
    k_total = ansatz.n_bitstrings

    def transfer_trace(operator: PauliSum, k: int, l: int) -> complex:
        # Tr[A T_lk] from the four phi Bloch vectors; Tr[A T_kl] is its
        # conjugate because A is hermitian and the phi traces are real.
        total = 0.0 + 0.0j
        for p, label in enumerate(pair_labels(k, l, k_total)):
            total += 0.5 * (-1j) ** p * bloch_trace(blochs[label], operator)
        return total

    energy = 0.0 + 0.0j
    for a_mu, b_mu, coeff in factorized.terms:
        for k in range(k_total):
            a_val = 1.0 if a_mu.is_identity() else bloch_trace(blochs[f"x{k}"], a_mu)
            b_val = 1.0 if b_mu.is_identity() else bloch_trace(blochs[f"x{k}"], b_mu)
            energy += coeff * lam[k] ** 2 * a_val * b_val
        for k in range(k_total):
            for l in range(k + 1, k_total):
                a_lk = transfer_trace(a_mu, k, l)
                b_lk = transfer_trace(b_mu, k, l)
                energy += coeff * lam[k] * lam[l] * (
                    np.conj(a_lk) * np.conj(b_lk) + a_lk * b_lk)
    return float(energy.real)


def purified_ci_from_blochs(
    blochs: dict[str, BlochVector],
    ansatz: ForgedAnsatz,
    lambdas,
    n_alpha: int,
    n_beta: int,
) -> tuple[CIVector, bool]:
    """Assemble, project, and extract in one step for a tomography run.

    Uses the full density when the register is small enough for the
    eigenvector fallback, the reference-row shortcut otherwise.
    """
    n = ansatz.layout.n_qubits
    reference = (bits_to_mask(ansatz.bitstrings[0]), bits_to_mask(ansatz.bitstrings[0]))
    if 2 * n <= _ASSEMBLY_QUBIT_CAP:
        rho = assemble_forged_density(blochs, ansatz, lambdas)
        rho = project_sector(rho, n, n_alpha, n_beta)
        return extract_ci_vector(rho, n, n_alpha, n_beta, reference)
    return forged_row_ci_vector(blochs, ansatz, lambdas, n_alpha, n_beta, reference)


@dataclass(frozen=True)
class PurifiedEnsemble:
    """Raw and purified energies over a set of tomography seeds."""

    raw_energies: np.ndarray
    purified_energies: np.ndarray
    n_fallbacks: int

    def raw_std(self) -> float:
        return float(np.std(self.raw_energies, ddof=1))

    def purified_std(self) -> float:
        return float(np.std(self.purified_energies, ddof=1))


def sector_trace_energy(
    rho: DensityMatrix,
    ham: ActiveSpaceHamiltonian,
) -> float:
    """Identity-block energy ratio Tr[H P rho P] / Tr[P rho P] + core.

    This is the subspace-expansion matrix element pair (H_II, S_II) for
    the identity operator with the sector projection applied first; a
    fully depolarized input therefore lands on the in-sector average of
    the spectrum rather than the whole-space average.
    """
    proj = project_sector(rho, ham.n_orbitals, ham.n_alpha, ham.n_beta)
    h_fock = fock_space_matrix(ham)
    return float(np.trace(h_fock @ proj.matrix).real) + ham.e_core


def purified_energy_samples(
    ansatz: ForgedAnsatz,
    ham: ActiveSpaceHamiltonian,
    thetas,
    lambdas,
    shots: int,
    seeds,
) -> PurifiedEnsemble:
    """Pair each tomography seed's raw energy with its purified energy.

    Raw is the sector-projected trace ratio of the assembled density
    (still a mixed state, so first-order tomography noise survives);
    purified extracts the CI vector and evaluates it exactly, which near
    a converged ansatz quenches the linear noise term.
    """
    raw = []
    purified = []
    fallbacks = 0
    h_mat = sector_hamiltonian_matrix(ham)
    for seed in seeds:
        blochs = forged_tomography_sweep(ansatz, thetas, shots, int(seed))
        rho = assemble_forged_density(blochs, ansatz, lambdas)
        raw.append(sector_trace_energy(rho, ham))
        ci, used_fallback = purified_ci_from_blochs(
            blochs, ansatz, lambdas, ham.n_alpha, ham.n_beta)
        fallbacks += int(used_fallback)
        vec = ci.amplitudes.reshape(-1)
        purified.append(float(np.vdot(vec, h_mat @ vec).real) + ham.e_core)
    return PurifiedEnsemble(np.array(raw), np.array(purified), fallbacks)
