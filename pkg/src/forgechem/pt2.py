"""Second-order perturbation theory on top of an active-space state.

The full-orbital Hamiltonian is split as H = H_D + V, where H_D keeps
the exact core-dressed interaction inside the active window and reduces
to a diagonal one-body Fock operator outside it.  The correction

    dE = - sum_{nu != 0} |<Psi_nu|V|Psi_0>|^2 / (E_nu - E_0)

is evaluated uncontracted, with the H_D eigenbasis obtained by dense
diagonalization of the full determinant sector.  That is combinatorial
in general but exact and cheap at the orbital counts treated here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .determinants import (
    CIVector,
    one_particle_rdm,
    orbital_strings,
    sector_hamiltonian_matrix,
)
from .errors import IntruderStateError, NumericalError, ValidationError
from .hamiltonian import ActiveSpaceHamiltonian

DEGENERACY_THRESHOLD = 1e-8
NUMERATOR_FLOOR = 1e-10


def generalized_fock(ham: ActiveSpaceHamiltonian, gamma: np.ndarray) -> np.ndarray:
    """f_pq = h_pq + sum_rs gamma_rs [(pq|rs) - (pr|sq)/2]."""
    if gamma.shape != ham.h1.shape:
        raise ValidationError("density shape does not match the orbital count")
    coulomb = np.einsum("rs,pqrs->pq", gamma, ham.h2)
    exchange = np.einsum("rs,prsq->pq", gamma, ham.h2)
    return ham.h1 + coulomb - 0.5 * exchange


def embed_in_full(ci: CIVector, n_full: int, window: tuple[int, int]) -> CIVector:
    """Lift an active-window CI vector into the full orbital set.

    Core orbitals (below the window) are doubly occupied, virtuals
    (above) empty.  Core indices sit below every active index, so the
    ascending creation-operator ordering introduces no extra signs.
    """
    start, stop = window
    if stop - start != ci.n_orbitals or start < 0 or stop > n_full:
        raise ValidationError("window does not match the active CI vector")
    core_mask = (1 << start) - 1
    n_alpha_full = start + ci.n_alpha
    n_beta_full = start + ci.n_beta
    strings_a = orbital_strings(n_full, n_alpha_full)
    strings_b = orbital_strings(n_full, n_beta_full)
    pos_a = {m: idx for idx, m in enumerate(strings_a)}
    pos_b = {m: idx for idx, m in enumerate(strings_b)}
    amps = np.zeros((len(strings_a), len(strings_b)), dtype=complex)
    for ia, ma in enumerate(ci.strings_alpha):
        row = pos_a[core_mask | (ma << start)]
        for jb, mb in enumerate(ci.strings_beta):
            amps[row, pos_b[core_mask | (mb << start)]] = ci.amplitudes[ia, jb]
    return CIVector(n_full, n_alpha_full, n_beta_full, amps)


@dataclass(frozen=True)
class DyallPartition:
    """H = H_D + V with H_D exact inside the active window.

    dyall_ham carries the dressed active integrals plus the diagonal
    inactive Fock entries as a standard Hamiltonian container; its
    e_core holds the calibration constant that makes the reference
    expectation values of H_D and H coincide.
    """

    full_ham: ActiveSpaceHamiltonian
    window: tuple[int, int]
    fock: np.ndarray
    dyall_ham: ActiveSpaceHamiltonian
    reference: CIVector = field(repr=False)

    @cached_property
    def full_matrix(self) -> np.ndarray:
        return sector_hamiltonian_matrix(self.full_ham)

    @cached_property
    def dyall_matrix(self) -> np.ndarray:
        return sector_hamiltonian_matrix(self.dyall_ham)

    @cached_property
    def dyall_eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        values, vectors = np.linalg.eigh(self.dyall_matrix)
        return values + self.dyall_ham.e_core, vectors

    def residual_matrix(self) -> np.ndarray:
        """V = H - H_D over the full determinant sector, constants included."""
        dim = self.full_matrix.shape[0]
        shift = self.full_ham.e_core - self.dyall_ham.e_core
        return self.full_matrix - self.dyall_matrix + shift * np.eye(dim)


def build_dyall(
    full_ham: ActiveSpaceHamiltonian,
    window: tuple[int, int],
    reference: CIVector,
) -> DyallPartition:
    """Assemble the partition from a full Hamiltonian and an active reference.

    The inactive Fock operator is built from the spin-summed density of
    the zeroth-order picture: doubly occupied core plus the reference's
    active one-particle density.  Only its diagonal enters H_D.
    """
    start, stop = window
    n = full_ham.n_orbitals
    if not (0 <= start < stop <= n):
        raise ValidationError("active window out of range")
    n_active = stop - start
    if (reference.n_orbitals, reference.n_alpha, reference.n_beta) != (
        n_active, full_ham.n_alpha - start, full_ham.n_beta - start,
    ):
        raise ValidationError("reference sector inconsistent with the window")

    gamma = np.zeros((n, n))
    for i in range(start):
        gamma[i, i] = 2.0
    gamma[start:stop, start:stop] = one_particle_rdm(reference)
    fock = generalized_fock(full_ham, gamma)

    core = range(start)
    h1_d = np.zeros_like(full_ham.h1)
    h1_d[start:stop, start:stop] = full_ham.h1[start:stop, start:stop]
    for i in core:
        h1_d[start:stop, start:stop] += (
            2.0 * full_ham.h2[start:stop, start:stop, i, i]
            - full_ham.h2[start:stop, i, i, start:stop]
        )
    inactive = [p for p in range(n) if not start <= p < stop]
    for p in inactive:
        h1_d[p, p] = fock[p, p]
    h2_d = np.zeros_like(full_ham.h2)
    h2_d[start:stop, start:stop, start:stop, start:stop] = (
        full_ham.h2[start:stop, start:stop, start:stop, start:stop])

    dyall = ActiveSpaceHamiltonian(
        n_orbitals=n,
        n_alpha=full_ham.n_alpha,
        n_beta=full_ham.n_beta,
        h1=h1_d,
        h2=h2_d,
        e_core=0.0,
    )
    psi0 = embed_in_full(reference, n, window).normalized()
    vec = psi0.amplitudes.reshape(-1)
    h_full = sector_hamiltonian_matrix(full_ham)
    h_dyall = sector_hamiltonian_matrix(dyall)
    # Calibrate the H_D constant so <0|H_D|0> = <0|H|0>; it cancels in
    # every denominator but keeps the two spectra on one scale.  The
    # expectation values are differenced before adding e_core so a
    # trivial partition (window = full space) calibrates to exactly
    # e_core and the residual vanishes identically.
    constant = full_ham.e_core + float(
        np.vdot(vec, h_full @ vec).real - np.vdot(vec, h_dyall @ vec).real)
    dyall = ActiveSpaceHamiltonian(
        n_orbitals=n,
        n_alpha=full_ham.n_alpha,
        n_beta=full_ham.n_beta,
        h1=h1_d,
        h2=h2_d,
        e_core=constant,
    )
    return DyallPartition(full_ham, window, fock, dyall, psi0)


@dataclass(frozen=True)
class PT2Result:
    delta_e: float
    n_terms: int
    samples: np.ndarray | None = None
    stderr: float | None = None


def correction_from_spectrum(
    energies: np.ndarray,
    vectors: np.ndarray,
    v_psi0: np.ndarray,
    psi0_vec: np.ndarray,
    e0: float,
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> PT2Result:
    """Sum the second-order series given an H_D eigensystem.

    v_psi0 is V|psi0> in the determinant basis.  The max-overlap
    eigenvector is excluded as the reference; near-degenerate states
    with negligible coupling are dropped, any other near-degenerate
    coupling raises an intruder-state error.
    """
    overlaps = vectors.conj().T @ psi0_vec
    nu0 = int(np.argmax(np.abs(overlaps)))
    couplings = vectors.conj().T @ v_psi0
    delta = 0.0
    n_terms = 0
    for nu in range(energies.size):
        if nu == nu0:
            continue
        numerator = abs(couplings[nu]) ** 2
        gap = energies[nu] - e0
        if abs(gap) < degeneracy_threshold:
            if numerator < NUMERATOR_FLOOR:
                continue
            raise IntruderStateError(
                f"state {nu} lies within {degeneracy_threshold} of the reference "
                f"with coupling {numerator:.3e}")
        term = -numerator / gap
        if term > 1e-12:
            raise NumericalError(
                f"state {nu} below the reference couples to it; "
                "the reference is not the zeroth-order ground state")
        if numerator > 1e-14:
            n_terms += 1
        delta += term
    return PT2Result(delta_e=float(delta), n_terms=n_terms)


def pt2_correction(
    partition: DyallPartition,
    psi0: CIVector,
    e0: float,
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> PT2Result:
    """Second-order correction for a full-space reference eigenpair."""
    full = partition.full_ham
    if (psi0.n_orbitals, psi0.n_alpha, psi0.n_beta) != (
        full.n_orbitals, full.n_alpha, full.n_beta,
    ):
        raise ValidationError("reference vector does not live in the full sector")
    vec = psi0.normalized().amplitudes.reshape(-1)
    energies, vectors = partition.dyall_eigensystem
    h_vec = partition.full_matrix @ vec + full.e_core * vec
    hd_vec = partition.dyall_matrix @ vec + partition.dyall_ham.e_core * vec
    return correction_from_spectrum(
        energies, vectors, h_vec - hd_vec, vec, e0, degeneracy_threshold)


def pt2_with_sampling(
    partition: DyallPartition,
    ci_samples: list[CIVector],
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> PT2Result:
    """Average the correction over sampled active-space CI vectors.

    Samples that trip the intruder-state guard are excluded with a
    warning rather than failing the whole ensemble.
    """
    if not ci_samples:
        raise ValidationError("at least one CI sample is required")
    full = partition.full_ham
    corrections = []
    n_terms = 0
    for index, sample in enumerate(ci_samples):
        embedded = embed_in_full(sample, full.n_orbitals, partition.window).normalized()
        vec = embedded.amplitudes.reshape(-1)
        e0 = float(np.vdot(vec, partition.full_matrix @ vec).real) + full.e_core
        try:
            result = pt2_correction(partition, embedded, e0, degeneracy_threshold)
        except IntruderStateError as exc:
            warnings.warn(f"sample {index} excluded: {exc}", stacklevel=2)
            continue
        corrections.append(result.delta_e)
        n_terms = result.n_terms
    if not corrections:
        raise IntruderStateError("every sample hit an intruder state")
    values = np.array(corrections)
    stderr = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return PT2Result(
        delta_e=float(np.mean(values)),
        n_terms=n_terms,
        samples=values,
        stderr=stderr,
    )
