"""Shot-noise Pauli tomography of sector registers.

A full tomography run measures a state in all 3^n single-qubit Pauli
eigenbases.  Each basis B contributes to every Pauli string obtained by
substituting I for a subset of B's letters, so a string supported on w
qubits pools shots from 3^(n-w) bases.  Estimates and their statistical
errors come from outcome counts through a Walsh-Hadamard transform; the
error bar of an estimate m over M pooled +-1 samples is

    eps = sample standard deviation / sqrt(M) = sqrt((1 - m^2) / (M - 1)),

which is exactly zero for deterministic outcomes, and the convention
shots = 0 requests exact expectation values with eps = 0.

Pauli strings are indexed in base 4 (I, X, Y, Z per letter) and bases in
base 3 (X, Y, Z per letter), qubit 0 in the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuits import Circuit, Gate, apply_circuit
from .errors import ValidationError

_LETTERS = "IXYZ"


def pauli_label_to_index(label: str) -> int:
    index = 0
    for letter in label:
        index = index * 4 + _LETTERS.index(letter)
    return index


def pauli_index_to_label(index: int, n_qubits: int) -> str:
    digits = []
    for _ in range(n_qubits):
        digits.append(_LETTERS[index % 4])
        index //= 4
    return "".join(reversed(digits))


def pauli_weights(n_qubits: int) -> np.ndarray:
    """Support size of every base-4 Pauli index."""
    weights = np.zeros(1, dtype=np.int64)
    for _ in range(n_qubits):
        weights = (weights[:, None] + np.array([0, 1, 1, 1])[None, :]).reshape(-1)
    return weights


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalized transform F[s] = sum_x (-1)^popcount(x & s) values[x]."""
    out = values.copy()
    half = 1
    while half < out.size:
        out = out.reshape(-1, 2 * half)
        left = out[:, :half].copy()
        right = out[:, half:].copy()
        out[:, :half] = left + right
        out[:, half:] = left - right
        out = out.reshape(-1)
        half *= 2
    return out


@dataclass(frozen=True)
class BlochVector:
    """Estimated expectation values of all 4^n Pauli strings.

    values[i] estimates a_P = Tr[P rho] for the i-th base-4 string and
    errors[i] its one-sigma statistical error; the identity entry is
    exactly 1 with error 0.
    """

    n_qubits: int
    values: np.ndarray
    errors: np.ndarray
    shots: int

    def __post_init__(self):
        dim = 4 ** self.n_qubits
        if self.values.shape != (dim,) or self.errors.shape != (dim,):
            raise ValidationError("Bloch vector arrays must have 4^n entries")
        if abs(self.values[0] - 1.0) > 1e-12 or abs(self.errors[0]) > 1e-12:
            raise ValidationError("identity entry must be exactly (1, 0)")
        if np.any(self.errors < 0.0) or np.any(self.errors > 1.0):
            raise ValidationError("errors must lie in [0, 1]")

    def value(self, label: str) -> float:
        return float(self.values[pauli_label_to_index(label)])

    def error(self, label: str) -> float:
        return float(self.errors[pauli_label_to_index(label)])

    def items(self):
        for index in range(4 ** self.n_qubits):
            yield pauli_index_to_label(index, self.n_qubits), (
                float(self.values[index]), float(self.errors[index]))


def measurement_bases(n_qubits: int) -> list[tuple[int, ...]]:
    """All 3^n letter assignments, 0 = X, 1 = Y, 2 = Z, lexicographic."""
    return list(product(range(3), repeat=n_qubits))


def _rotation_circuit(basis: tuple[int, ...]) -> Circuit:
    gates = []
    for qubit, letter in enumerate(basis):
        if letter == 0:
            gates.append(Gate("h", (qubit,)))
        elif letter == 1:
            gates.append(Gate("sdg", (qubit,)))
            gates.append(Gate("h", (qubit,)))
    return Circuit(len(basis), tuple(gates))


def _basis_pauli_indices(basis: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Pauli index reached by each support subset of one basis.

    Subset masks live in index-bit space (bit n-1-p is qubit p), matching
    the Walsh-Hadamard output layout.
    """
    subsets = np.arange(1 << n_qubits, dtype=np.int64)
    indices = np.zeros(1 << n_qubits, dtype=np.int64)
    for qubit, letter in enumerate(basis):
        bit = (subsets >> (n_qubits - 1 - qubit)) & 1
        indices += bit * (letter + 1) * 4 ** (n_qubits - 1 - qubit)
    return indices


def exact_bloch(state: np.ndarray) -> BlochVector:
    """Exact Bloch vector of a pure state (the shots = 0 mode)."""
    dim = state.size
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValidationError("state dimension is not a power of two")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError("state must be normalized")
    r = np.arange(dim, dtype=np.int64)
    values = np.zeros(4 ** n)
    for x_mask in range(dim):
        diag = state[r ^ x_mask] * np.conj(state)
        transformed = walsh_hadamard(diag)
        z_masks = r
        n_y = np.bitwise_count(np.int64(x_mask) & z_masks)
        entries = transformed * (-1j) ** n_y
        if np.max(np.abs(entries.imag)) > 1e-10:
            raise ValidationError("Bloch entries of a valid state must be real")
        indices = _xz_pauli_indices(x_mask, n)
        values[indices] = entries.real
    values[0] = 1.0
    return BlochVector(n, values, np.zeros(4 ** n), shots=0)


def _xz_pauli_indices(x_mask: int, n_qubits: int) -> np.ndarray:
    """Pauli indices for fixed x_mask over all z_masks (index-bit space)."""
    z_masks = np.arange(1 << n_qubits, dtype=np.int64)
    indices = np.zeros(1 << n_qubits, dtype=np.int64)
    lookup = np.array([0, 3, 1, 2], dtype=np.int64)  # (x, z) -> IXYZ digit
    for p in range(n_qubits):
        shift = n_qubits - 1 - p
        x_bit = (x_mask >> shift) & 1
        z_bit = (z_masks >> shift) & 1
        indices += lookup[2 * x_bit + z_bit] * 4 ** shift
    return indices


def sample_tomography(prep: np.ndarray, circuit: Circuit, shots: int, seed) -> BlochVector:
    """Tomograph circuit|prep> with a shot budget per measurement basis.

    Every basis owns an independent RNG stream derived from (seed, basis
    index), so results do not depend on execution order.  shots = 0
    returns the exact Bloch vector.
    """
    if shots < 0:
        raise ValidationError("shots must be nonnegative")
    state = apply_circuit(circuit, prep)
    if shots == 0:
        return exact_bloch(state)

    n = circuit.n_qubits
    seed_key = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    sums = np.zeros(4 ** n)
    for basis_index, basis in enumerate(measurement_bases(n)):
        rotated = apply_circuit(_rotation_circuit(basis), state)
        probs = np.abs(rotated) ** 2
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        rng = np.random.default_rng(seed_key + [basis_index])
        counts = rng.multinomial(shots, probs).astype(float)
        transformed = walsh_hadamard(counts)
        np.add.at(sums, _basis_pauli_indices(basis, n), transformed)

    pooled = shots * 3.0 ** (n - pauli_weights(n))
    values = sums / pooled
    values[0] = 1.0
    spread = np.clip(1.0 - values ** 2, 0.0, 1.0)
    errors = np.sqrt(spread / np.maximum(pooled - 1.0, 1.0))
    errors[0] = 0.0
    return BlochVector(n, values, errors, shots=shots)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian unit-trace matrix reconstructed from tomography."""

    matrix: np.ndarray

    def __post_init__(self):
        dim = self.matrix.shape[0]
        if self.matrix.shape != (dim, dim) or dim & (dim - 1):
            raise ValidationError("density matrix must be square with 2^n rows")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > 1e-8:
            raise ValidationError("density matrix must be hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > 1e-8:
            raise ValidationError("density matrix must have unit trace")

    @property
    def n_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1


def reconstruct_density(bloch: BlochVector) -> DensityMatrix:
    """rho = 2^-n sum_P a_P P via per-x_mask inverse transforms."""
    n = bloch.n_qubits
    dim = 1 << n
    r = np.arange(dim, dtype=np.int64)
    rho = np.zeros((dim, dim), dtype=complex)
    for x_mask in range(dim):
        entries = bloch.values[_xz_pauli_indices(x_mask, n)].astype(complex)
        n_y = np.bitwise_count(np.int64(x_mask) & r)
        entries = entries * 1j ** n_y
        rho[r ^ x_mask, r] = walsh_hadamard(entries) / dim
    return DensityMatrix(rho)


def forged_tomography_sweep(ansatz, thetas, shots: int, seed: int) -> dict[str, BlochVector]:
    """Tomograph every forged preparation dressed by U(theta).

    Returns one Bloch vector per preparation label; for two bitstrings
    these are x0, x1 and phi0..phi3.
    """
    circuit = ansatz.layout.circuit(np.asarray(thetas, dtype=float))
    results: dict[str, BlochVector] = {}
    for prep_index, (label, prep) in enumerate(ansatz.preparations()):
        results[label] = sample_tomography(prep, circuit, shots, (seed, prep_index))
    return results
