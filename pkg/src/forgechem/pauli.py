"""Weighted Pauli-string algebra on small qubit registers.

A Pauli string on n qubits is stored in symplectic form as a pair of
integer masks (x_mask, z_mask).  Bit (n - 1 - p) of a mask refers to
qubit p, so the masks line up with statevector indices: qubit 0 is the
most significant bit of the basis-state index, and the bitstring
|10> on two qubits is the amplitude vector (0, 0, 1, 0).

Per qubit the (x, z) bit pair encodes I = (0,0), X = (1,0), Y = (1,1),
Z = (0,1).  The matrix entries of a string P follow from

    P[r, r ^ x_mask] = (-i)**n_Y * (-1)**popcount(r & z_mask)

with n_Y = popcount(x_mask & z_mask).  Expectation values and operator
application go through a compiled plan that groups strings by their
x_mask, so a sum with many strings costs one fused numpy pass per
distinct mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ValidationError

PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_XZ_OF_LETTER = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_LETTER_OF_XZ = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_PRUNE_TOL = 1e-14
_MATRIX_QUBIT_CAP = 12


def label_to_masks(label: str) -> tuple[int, int]:
    """Convert a letter string such as "XIZ" to (x_mask, z_mask)."""
    x_mask = 0
    z_mask = 0
    for letter in label:
        try:
            x, z = _XZ_OF_LETTER[letter]
        except KeyError:
            raise ValidationError(f"unknown Pauli letter {letter!r}") from None
        x_mask = (x_mask << 1) | x
        z_mask = (z_mask << 1) | z
    return x_mask, z_mask


def masks_to_label(x_mask: int, z_mask: int, n_qubits: int) -> str:
    letters = []
    for p in range(n_qubits):
        bit = 1 << (n_qubits - 1 - p)
        letters.append(_LETTER_OF_XZ[(int(bool(x_mask & bit)), int(bool(z_mask & bit)))])
    return "".join(letters)


def _string_product(key1: tuple[int, int], key2: tuple[int, int]) -> tuple[tuple[int, int], complex]:
    """Product of two Pauli strings: returns ((x3, z3), phase) with
    P1 P2 = phase * P3."""
    x1, z1 = key1
    x2, z2 = key2
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    exponent = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (z1 & x2).bit_count()
    ) % 4
    return (x3, z3), 1j ** exponent


@dataclass
class PauliSum:
    """Linear combination of Pauli strings with complex weights.

    Treat instances as immutable: every algebraic operation returns a
    new sum, and the application plan is cached on first use.
    """

    n_qubits: int
    terms: dict[tuple[int, int], complex] = field(default_factory=dict)
    _plan: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("need at least one qubit")
        pruned = {k: complex(v) for k, v in self.terms.items() if abs(v) > _PRUNE_TOL}
        self.terms = pruned

    # -- constructors ------------------------------------------------

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliSum":
        return cls(len(label), {label_to_masks(label): complex(coeff)})

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, {(0, 0): 1.0 + 0.0j})

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, {})

    # -- inspection --------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def labels(self) -> dict[str, complex]:
        return {masks_to_label(x, z, self.n_qubits): c for (x, z), c in self.terms.items()}

    def is_identity(self, tol: float = 1e-12) -> bool:
        if len(self.terms) != 1 or (0, 0) not in self.terms:
            return False
        return abs(self.terms[(0, 0)] - 1.0) <= tol

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    # -- algebra -----------------------------------------------------

    def _check_compatible(self, other: "PauliSum"):
        if self.n_qubits != other.n_qubits:
            raise ValidationError("qubit counts differ")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_compatible(other)
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            merged[key] = merged.get(key, 0.0) + coeff
        return PauliSum(self.n_qubits, merged)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, {k: scalar * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            self._check_compatible(other)
            merged: dict[tuple[int, int], complex] = {}
            for key1, c1 in self.terms.items():
                for key2, c2 in other.terms.items():
                    key3, phase = _string_product(key1, key2)
                    merged[key3] = merged.get(key3, 0.0) + c1 * c2 * phase
            return PauliSum(self.n_qubits, merged)
        return PauliSum(self.n_qubits, {k: other * v for k, v in self.terms.items()})

    def dagger(self) -> "PauliSum":
        return PauliSum(self.n_qubits, {k: v.conjugate() for k, v in self.terms.items()})

    # -- numerics ----------------------------------------------------

    def _compiled(self):
        if self._plan is None:
            dim = 1 << self.n_qubits
            r = np.arange(dim, dtype=np.int64)
            groups: dict[int, list[tuple[int, complex]]] = {}
            for (x_mask, z_mask), coeff in self.terms.items():
                groups.setdefault(x_mask, []).append((z_mask, coeff))
            x_masks = np.array(sorted(groups), dtype=np.int64)
            phases = np.zeros((len(x_masks), dim), dtype=complex)
            for g, x_mask in enumerate(x_masks):
                for z_mask, coeff in groups[int(x_mask)]:
                    n_y = (int(x_mask) & z_mask).bit_count()
                    signs = 1.0 - 2.0 * (np.bitwise_count(r & z_mask) & 1)
                    phases[g] += coeff * ((-1j) ** n_y) * signs
            gathers = r[None, :] ^ x_masks[:, None]
            self._plan = (x_masks, phases, gathers)
        return self._plan

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Return (sum of strings) |state>."""
        _, phases, gathers = self._compiled()
        if state.shape != (1 << self.n_qubits,):
            raise ValidationError("state dimension mismatch")
        return np.einsum("gi,gi->i", phases, state[gathers])

    def expectation(self, state: np.ndarray) -> complex:
        """Return <state| (sum of strings) |state> without building a matrix."""
        _, phases, gathers = self._compiled()
        if state.shape != (1 << self.n_qubits,):
            raise ValidationError("state dimension mismatch")
        return complex(np.einsum("i,gi,gi->", np.conj(state), phases, state[gathers]))

    def to_matrix(self) -> np.ndarray:
        """Dense matrix of the sum; capped to small registers."""
        if self.n_qubits > _MATRIX_QUBIT_CAP:
            raise CapacityError(f"dense matrix beyond {_MATRIX_QUBIT_CAP} qubits")
        dim = 1 << self.n_qubits
        r = np.arange(dim, dtype=np.int64)
        mat = np.zeros((dim, dim), dtype=complex)
        for (x_mask, z_mask), coeff in self.terms.items():
            n_y = (x_mask & z_mask).bit_count()
            signs = 1.0 - 2.0 * (np.bitwise_count(r & z_mask) & 1)
            mat[r, r ^ x_mask] += coeff * ((-1j) ** n_y) * signs
        return mat
