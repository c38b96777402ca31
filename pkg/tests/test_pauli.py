"""Pauli-string algebra against explicit Kronecker-product references."""

import numpy as np
import pytest

from forgechem.errors import CapacityError, ValidationError
from forgechem.pauli import PAULI_MATS, PauliSum, label_to_masks, masks_to_label

LETTERS = "IXYZ"


def kron_of_label(label: str) -> np.ndarray:
    """Independent dense matrix for a letter string, qubit 0 leftmost."""
    mat = np.eye(1, dtype=complex)
    for letter in label:
        mat = np.kron(mat, PAULI_MATS[letter])
    return mat


def random_label(rng, n: int) -> str:
    return "".join(rng.choice(list(LETTERS)) for _ in range(n))


def test_label_mask_round_trip():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3, 5):
        for _ in range(20):
            label = random_label(rng, n)
            x, z = label_to_masks(label)
            assert masks_to_label(x, z, n) == label


def test_label_rejects_unknown_letter():
    with pytest.raises(ValidationError):
        label_to_masks("XQ")


def test_single_strings_match_kron():
    for n in (1, 2, 3):
        for index in range(4 ** n):
            label = ""
            rest = index
            for _ in range(n):
                label = LETTERS[rest % 4] + label
                rest //= 4
            got = PauliSum.from_label(label).to_matrix()
            np.testing.assert_allclose(got, kron_of_label(label), atol=1e-12)


def test_sum_matches_kron():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        labels = [random_label(rng, n) for _ in range(4)]
        coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
        total = PauliSum.zero(n)
        expected = np.zeros((1 << n, 1 << n), dtype=complex)
        for label, coeff in zip(labels, coeffs):
            total = total + complex(coeff) * PauliSum.from_label(label)
            expected += coeff * kron_of_label(label)
        np.testing.assert_allclose(total.to_matrix(), expected, atol=1e-12)


def test_product_matches_matrix_product():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        a = PauliSum.zero(n)
        b = PauliSum.zero(n)
        for _ in range(3):
            a = a + complex(rng.normal()) * PauliSum.from_label(random_label(rng, n))
            b = b + complex(rng.normal()) * PauliSum.from_label(random_label(rng, n))
        np.testing.assert_allclose(
            (a * b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)


def test_xy_product_phase():
    # X Y = iZ on one qubit
    got = PauliSum.from_label("X") * PauliSum.from_label("Y")
    assert got.labels() == {"Z": 1j}


def test_apply_matches_matrix():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        op = PauliSum.zero(n)
        for _ in range(3):
            op = op + complex(rng.normal(), rng.normal()) * PauliSum.from_label(
                random_label(rng, n))
        state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        np.testing.assert_allclose(op.apply(state), op.to_matrix() @ state, atol=1e-12)


def test_expectation_matches_matrix():
    rng = np.random.default_rng(4)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        op = PauliSum.zero(n)
        for _ in range(3):
            op = op + complex(rng.normal()) * PauliSum.from_label(random_label(rng, n))
        state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        state /= np.linalg.norm(state)
        got = op.expectation(state)
        want = np.vdot(state, op.to_matrix() @ state)
        assert abs(got - want) < 1e-12


def test_dagger_is_conjugate_transpose():
    rng = np.random.default_rng(5)
    op = PauliSum.zero(2)
    for _ in range(4):
        op = op + complex(rng.normal(), rng.normal()) * PauliSum.from_label(
            random_label(rng, 2))
    np.testing.assert_allclose(op.dagger().to_matrix(), op.to_matrix().conj().T, atol=1e-12)


def test_hermiticity_detection():
    real = PauliSum.from_label("XZ", 0.7) + PauliSum.from_label("YY", -1.2)
    assert real.is_hermitian()
    assert not (real + PauliSum.from_label("ZI", 0.5j)).is_hermitian()


def test_identity_detection_and_pruning():
    ident = PauliSum.identity(3)
    assert ident.is_identity()
    assert not PauliSum.from_label("IIZ").is_identity()
    # cancelling terms prune to the zero sum
    cancelled = PauliSum.from_label("XY") - PauliSum.from_label("XY")
    assert cancelled.n_terms == 0


def test_incompatible_registers_rejected():
    with pytest.raises(ValidationError):
        PauliSum.identity(2) + PauliSum.identity(3)


def test_matrix_capacity_cap():
    with pytest.raises(CapacityError):
        PauliSum.identity(13).to_matrix()
