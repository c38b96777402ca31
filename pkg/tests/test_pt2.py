"""Dyall partitioning and the second-order energy correction."""

import warnings

import numpy as np
import pytest

from forgechem.determinants import CIVector, sector_hamiltonian_matrix
from forgechem.errors import IntruderStateError, NumericalError, ValidationError
from forgechem.hamiltonian import ActiveSpaceHamiltonian, reduce_to_window
from forgechem.oracle import fci_ground_state
from forgechem.pt2 import (
    DyallPartition,
    build_dyall,
    correction_from_spectrum,
    embed_in_full,
    generalized_fock,
    pt2_correction,
    pt2_with_sampling,
)
from test_hamiltonian import random_hamiltonian


@pytest.fixture(scope="module")
def layered4_partition(ham_layered4):
    active = reduce_to_window(ham_layered4, (1, 3))
    _, states = fci_ground_state(active)
    partition = build_dyall(ham_layered4, (1, 3), states[0])
    return partition, states[0], active


def test_generalized_fock_matches_explicit_loops():
    rng = np.random.default_rng(41)
    ham = random_hamiltonian(rng, 3, n_alpha=2, n_beta=1)
    gamma = rng.normal(size=(3, 3))
    gamma = gamma + gamma.T
    fock = generalized_fock(ham, gamma)
    want = ham.h1.copy()
    for p in range(3):
        for q in range(3):
            for r in range(3):
                for s in range(3):
                    want[p, q] += gamma[r, s] * (
                        ham.h2[p, q, r, s] - 0.5 * ham.h2[p, r, s, q])
    np.testing.assert_allclose(fock, want, atol=1e-12)

    bare = ActiveSpaceHamiltonian(
        n_orbitals=3, n_alpha=2, n_beta=1,
        h1=ham.h1, h2=np.zeros_like(ham.h2), e_core=0.0)
    np.testing.assert_allclose(generalized_fock(bare, gamma), ham.h1, atol=1e-15)
    with pytest.raises(ValidationError):
        generalized_fock(ham, np.eye(2))


def test_embedding_fills_the_core_and_preserves_amplitudes(ham_layered4):
    rng = np.random.default_rng(43)
    active = CIVector(2, 1, 1, rng.normal(size=(2, 2)).astype(complex)).normalized()
    embedded = embed_in_full(active, 4, (1, 3))
    assert (embedded.n_orbitals, embedded.n_alpha, embedded.n_beta) == (4, 2, 2)
    assert np.linalg.norm(embedded.amplitudes) == pytest.approx(1.0, abs=1e-12)

    point = CIVector(2, 1, 1, np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex))
    lifted = embed_in_full(point, 4, (1, 3))
    # active masks (0b10, 0b01) shift past the doubly occupied orbital 0
    assert lifted.dominant_determinant() == (0b0101, 0b0011)

    reduced = reduce_to_window(ham_layered4, (1, 3))
    assert active.energy(reduced) == pytest.approx(
        embedded.energy(ham_layered4), abs=1e-10)

    with pytest.raises(ValidationError):
        embed_in_full(active, 4, (1, 4))
    with pytest.raises(ValidationError):
        embed_in_full(active, 3, (2, 4))


def test_partition_reconstructs_the_full_hamiltonian(layered4_partition, ham_layered4):
    partition, _, _ = layered4_partition
    dim = partition.full_matrix.shape[0]
    full_total = partition.full_matrix + ham_layered4.e_core * np.eye(dim)
    dyall_total = partition.dyall_matrix + partition.dyall_ham.e_core * np.eye(dim)
    np.testing.assert_allclose(
        dyall_total + partition.residual_matrix(), full_total, atol=1e-12)

    vec = partition.reference.amplitudes.reshape(-1)
    assert vec.conj() @ dyall_total @ vec == pytest.approx(
        (vec.conj() @ full_total @ vec).real, abs=1e-10)


def test_correction_matches_a_dense_oracle(layered4_partition, ham_layered4):
    partition, _, _ = layered4_partition
    psi0 = partition.reference
    e0 = psi0.energy(ham_layered4)
    result = pt2_correction(partition, psi0, e0)
    assert result.delta_e < 0.0
    assert result.n_terms == 29

    energies, vectors = np.linalg.eigh(partition.dyall_matrix)
    energies = energies + partition.dyall_ham.e_core
    vec = psi0.amplitudes.reshape(-1)
    coupled = partition.residual_matrix() @ vec
    nu0 = int(np.argmax(np.abs(vectors.conj().T @ vec)))
    total = 0.0
    for nu in range(energies.size):
        if nu == nu0:
            continue
        total -= abs(vectors[:, nu].conj() @ coupled) ** 2 / (energies[nu] - e0)
    assert result.delta_e == pytest.approx(total, abs=1e-10)


def test_full_window_leaves_no_residual(ham_layered4):
    _, states = fci_ground_state(ham_layered4)
    partition = build_dyall(ham_layered4, (0, 4), states[0])
    assert np.max(np.abs(partition.residual_matrix())) < 1e-12
    e0 = states[0].energy(ham_layered4)
    result = pt2_correction(partition, states[0], e0)
    assert result.delta_e == 0.0
    assert result.n_terms == 0


def test_correction_scales_quadratically_with_the_coupling(layered4_partition, ham_layered4):
    partition, _, _ = layered4_partition
    psi0_vec = partition.reference.amplitudes.reshape(-1)
    e0 = partition.reference.energy(ham_layered4)
    energies, vectors = partition.dyall_eigensystem
    coupled = partition.residual_matrix() @ psi0_vec
    base = correction_from_spectrum(energies, vectors, coupled, psi0_vec, e0)
    for scale in (0.5, 0.25):
        scaled = correction_from_spectrum(
            energies, vectors, scale * coupled, psi0_vec, e0)
        assert scaled.delta_e == pytest.approx(
            scale ** 2 * base.delta_e, rel=1e-10)


def test_sampling_reduces_to_the_clean_correction(layered4_partition, ham_layered4):
    partition, reference, _ = layered4_partition
    clean = pt2_correction(
        partition, partition.reference, partition.reference.energy(ham_layered4))
    repeated = pt2_with_sampling(partition, [reference] * 3)
    assert repeated.delta_e == pytest.approx(clean.delta_e, abs=1e-12)
    assert repeated.stderr == 0.0
    assert repeated.samples.shape == (3,)

    single = pt2_with_sampling(partition, [reference])
    assert single.stderr == 0.0


def test_sampled_mean_brackets_the_clean_correction(layered4_partition, ham_layered4):
    partition, reference, _ = layered4_partition
    clean = pt2_correction(
        partition, partition.reference, partition.reference.energy(ham_layered4))
    rng = np.random.default_rng(11)
    samples = []
    for _ in range(20):
        amps = reference.amplitudes + 0.02 * rng.normal(size=reference.amplitudes.shape)
        samples.append(CIVector(2, 1, 1, amps.astype(complex)).normalized())
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ensemble = pt2_with_sampling(partition, samples)
    assert ensemble.samples.shape == (20,)
    assert ensemble.stderr > 0.0
    assert np.all(ensemble.samples < 0.0)
    assert abs(ensemble.delta_e - clean.delta_e) < 5.0 * ensemble.stderr


def test_degenerate_coupled_state_is_an_intruder():
    energies = np.array([0.0, 1e-9])
    vectors = np.eye(2, dtype=complex)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    with pytest.raises(IntruderStateError):
        correction_from_spectrum(
            energies, vectors, np.array([0.0, 0.1], dtype=complex), psi0, 0.0)
    # negligible coupling within the degeneracy window is dropped instead
    quiet = correction_from_spectrum(
        energies, vectors, np.array([0.0, 1e-11], dtype=complex), psi0, 0.0)
    assert quiet.delta_e == 0.0


def test_coupled_state_below_the_reference_is_rejected():
    energies = np.array([-1.0, 0.0])
    vectors = np.eye(2, dtype=complex)
    psi0 = np.array([0.0, 1.0], dtype=complex)
    with pytest.raises(NumericalError):
        correction_from_spectrum(
            energies, vectors, np.array([0.1, 0.0], dtype=complex), psi0, 0.0)


def test_all_samples_excluded_raises(layered4_partition):
    partition, reference, _ = layered4_partition
    with pytest.warns(UserWarning, match="excluded"):
        with pytest.raises(IntruderStateError, match="every sample"):
            pt2_with_sampling(partition, [reference], degeneracy_threshold=1e3)


def test_sector_and_window_validation(ham_layered4, layered4_partition):
    partition, reference, active = layered4_partition
    with pytest.raises(ValidationError):
        build_dyall(ham_layered4, (1, 5), reference)
    with pytest.raises(ValidationError):
        build_dyall(ham_layered4, (0, 3), reference)
    with pytest.raises(ValidationError):
        pt2_correction(partition, reference, 0.0)
    with pytest.raises(ValidationError):
        pt2_with_sampling(partition, [])
