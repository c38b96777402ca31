"""Qubit encodings of fermionic operators against dense determinant oracles."""

import numpy as np
import pytest

from forgechem.determinants import (
    apply_annihilate,
    apply_create,
    fock_space_matrix,
    mask_to_axis_index,
)
from forgechem.operators import (
    annihilation_sum,
    creation_sum,
    excitation_sum,
    sector_hamiltonian_sum,
    spin_factorize,
)
from forgechem.hamiltonian import ActiveSpaceHamiltonian
from test_hamiltonian import random_hamiltonian


def dense_creation(p, n):
    """Matrix for the creation operator on an n-orbital register."""
    dim = 1 << n
    out = np.zeros((dim, dim))
    for mask in range(dim):
        hit = apply_create(mask, p)
        if hit is None:
            continue
        new_mask, sign = hit
        out[mask_to_axis_index(new_mask, n), mask_to_axis_index(mask, n)] = sign
    return out


def dense_annihilation(p, n):
    dim = 1 << n
    out = np.zeros((dim, dim))
    for mask in range(dim):
        hit = apply_annihilate(mask, p)
        if hit is None:
            continue
        new_mask, sign = hit
        out[mask_to_axis_index(new_mask, n), mask_to_axis_index(mask, n)] = sign
    return out


def test_creation_sum_matches_determinant_action():
    for n in (2, 3):
        for p in range(n):
            got = creation_sum(p, n).to_matrix()
            np.testing.assert_allclose(got, dense_creation(p, n), atol=1e-12)


def test_annihilation_is_creation_adjoint():
    n = 3
    for p in range(n):
        got = annihilation_sum(p, n).to_matrix()
        np.testing.assert_allclose(got, dense_creation(p, n).conj().T, atol=1e-12)


def test_creation_anticommutators():
    n = 3
    for p in range(n):
        for q in range(n):
            cp = creation_sum(p, n).to_matrix()
            aq = annihilation_sum(q, n).to_matrix()
            anti = cp @ aq + aq @ cp
            np.testing.assert_allclose(
                anti, np.eye(1 << n) * (1.0 if p == q else 0.0), atol=1e-12)
            cq = creation_sum(q, n).to_matrix()
            np.testing.assert_allclose(
                cp @ cq + cq @ cp, np.zeros((1 << n, 1 << n)), atol=1e-12)


def test_excitation_sum_matches_composition():
    n = 3
    for p in range(n):
        for q in range(n):
            got = excitation_sum(p, q, n).to_matrix()
            want = dense_creation(p, n) @ dense_annihilation(q, n)
            np.testing.assert_allclose(got, want, atol=1e-12)


def test_number_operator_is_diagonal_projector():
    n = 2
    for p in range(n):
        mat = excitation_sum(p, p, n).to_matrix()
        np.testing.assert_allclose(mat, np.diag(np.diag(mat)), atol=1e-12)
        np.testing.assert_allclose(mat @ mat, mat, atol=1e-12)


def test_sector_sum_matches_dense_formula():
    rng = np.random.default_rng(31)
    n = 2
    for trial in range(3):
        ham = random_hamiltonian(rng, n)
        got = sector_hamiltonian_sum(ham).to_matrix()
        g = ham.h1 - 0.5 * np.einsum("pttq->pq", ham.h2)
        want = np.zeros((1 << n, 1 << n), dtype=complex)
        for p in range(n):
            for q in range(n):
                e_pq = dense_creation(p, n) @ dense_annihilation(q, n)
                want += g[p, q] * e_pq
                for r in range(n):
                    for s in range(n):
                        e_rs = dense_creation(r, n) @ dense_annihilation(s, n)
                        want += 0.5 * ham.h2[p, q, r, s] * (e_pq @ e_rs)
        np.testing.assert_allclose(got, want, atol=1e-10)
        np.testing.assert_allclose(got, got.conj().T, atol=1e-12)


def test_diagonal_h1_spectrum_is_orbital_sums():
    eps = np.array([-1.0, 0.5])
    ham = ActiveSpaceHamiltonian(2, 1, 1, np.diag(eps), np.zeros((2,) * 4), 0.0)
    mat = fock_space_matrix(ham)
    np.testing.assert_allclose(mat, np.diag(np.diag(mat)), atol=1e-12)
    want = sorted(
        eps[list(occ_a)].sum() + eps[list(occ_b)].sum()
        for occ_a in ([], [0], [1], [0, 1])
        for occ_b in ([], [0], [1], [0, 1])
    )
    np.testing.assert_allclose(sorted(np.diag(mat)), want, atol=1e-12)


def test_factorization_has_no_cross_terms_without_repulsion():
    rng = np.random.default_rng(33)
    h1 = rng.normal(size=(2, 2))
    ham = ActiveSpaceHamiltonian(2, 1, 1, 0.5 * (h1 + h1.T), np.zeros((2,) * 4), 0.0)
    factorized = spin_factorize(ham)
    assert factorized.n_cross_terms == 0
    for left, right, _ in factorized.terms:
        assert left.is_identity() or right.is_identity()


def test_cross_term_count_is_bounded_by_orbital_pairs():
    rng = np.random.default_rng(34)
    for n in (2, 3):
        ham = random_hamiltonian(rng, n)
        factorized = spin_factorize(ham)
        assert factorized.n_cross_terms <= n * (n + 1) // 2


def test_reassembled_hamiltonian_matches_fock_matrix():
    rng = np.random.default_rng(35)
    for trial in range(3):
        ham = random_hamiltonian(rng, 2, e_core=rng.normal())
        got = spin_factorize(ham).reassemble()
        want = fock_space_matrix(ham) + ham.e_core * np.eye(16)
        np.testing.assert_allclose(got, want, atol=1e-10)
        np.testing.assert_allclose(got, got.conj().T, atol=1e-12)
