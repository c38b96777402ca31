"""Dense statevector circuits for one sector register.

The register convention matches the rest of the package: qubit p holds
orbital p and is the p-th most significant bit of the basis index, so
the two-qubit bitstring |10> is the amplitude vector (0, 0, 1, 0).

The entangling primitive is the hop gate

    hop(theta) = [[1, 0,           0,          0],
                  [0, cos(theta),  sin(theta), 0],
                  [0, sin(theta), -cos(theta), 0],
                  [0, 0,           0,         -1]]

in the |00>, |01>, |10>, |11> basis.  It is real, involutory, and
commutes with the particle number, so circuits built from it preserve
the Hamming weight of their input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinants import bits_to_mask, mask_to_axis_index
from .errors import ValidationError

# per-circuit gate accounting: each state-preparation unitary, hop gate,
# and measured qubit contributes this many (single-qubit, two-qubit) gates
GATES_PER_INIT_UNITARY = (4, 1)
GATES_PER_HOP = (4, 3)
GATES_PER_MEASURED_QUBIT = (2, 0)

_DEFAULT_HOPS = {2: 1, 4: 2, 6: 6, 8: 12}


def hop_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, s, 0.0],
        [0.0, s, -c, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ], dtype=complex)


def superposition_init_matrix(p: int) -> np.ndarray:
    """Two-qubit unitary with |00> -> (|10> + i^p |01>) / sqrt(2).

    Realizable as H and R_p on the first qubit followed by CNOT and X,
    with R_0 = I, R_1 = ZS, R_2 = Z, R_3 = S fixing the relative phase;
    the global phase is absorbed into the matrix so the prepared
    amplitudes are exactly the superposition above.
    """
    if p not in (0, 1, 2, 3):
        raise ValidationError("superposition phase index must be 0..3")
    rt = 1.0 / np.sqrt(2.0)
    phase = 1j ** p
    return np.array([
        [0.0, 0.0, 1.0, 0.0],
        [phase * rt, -phase * rt, 0.0, 0.0],
        [rt, rt, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ], dtype=complex)


_FIXED_1Q = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}

_CNOT = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=complex)


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    param: float | int | None = None

    def matrix(self) -> np.ndarray:
        if self.name in _FIXED_1Q:
            return _FIXED_1Q[self.name]
        if self.name == "cx":
            return _CNOT
        if self.name == "hop":
            return hop_matrix(float(self.param))
        if self.name == "sprep":
            return superposition_init_matrix(int(self.param))
        raise ValidationError(f"unknown gate {self.name!r}")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a fixed-width register."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        for gate in self.gates:
            arity = 1 if gate.name in _FIXED_1Q else 2
            if len(gate.qubits) != arity:
                raise ValidationError(f"gate {gate.name!r} expects {arity} qubits")
            if len(set(gate.qubits)) != len(gate.qubits):
                raise ValidationError("gate qubits must be distinct")
            if not all(0 <= q < self.n_qubits for q in gate.qubits):
                raise ValidationError("gate qubit index out of range")

    def then(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValidationError("register widths differ")
        return Circuit(self.n_qubits, self.gates + other.gates)


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    tensor = state.reshape((2,) * n)
    tensor = np.tensordot(mat, tensor, axes=([1], [q]))
    return np.moveaxis(tensor, 0, q).reshape(-1)


def _apply_2q(state: np.ndarray, mat: np.ndarray, q0: int, q1: int, n: int) -> np.ndarray:
    tensor = state.reshape((2,) * n)
    mat4 = mat.reshape(2, 2, 2, 2)
    tensor = np.tensordot(mat4, tensor, axes=([2, 3], [q0, q1]))
    return np.moveaxis(tensor, [0, 1], [q0, q1]).reshape(-1)


def apply_circuit(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Apply the circuit to a statevector, returning a new array."""
    n = circuit.n_qubits
    if state.shape != (1 << n,):
        raise ValidationError("state dimension mismatch")
    out = state.astype(complex, copy=True)
    for gate in circuit.gates:
        mat = gate.matrix()
        if len(gate.qubits) == 1:
            out = _apply_1q(out, mat, gate.qubits[0], n)
        else:
            out = _apply_2q(out, mat, gate.qubits[0], gate.qubits[1], n)
    return out


@dataclass(frozen=True)
class AnsatzLayout:
    """Brick-wall arrangement of hop gates on one sector register."""

    n_qubits: int
    hops: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for a, b in self.hops:
            if not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits and a != b):
                raise ValidationError("hop gate qubits out of range")

    @property
    def n_hops(self) -> int:
        return len(self.hops)

    @property
    def n_parameters(self) -> int:
        return len(self.hops)

    def circuit(self, thetas: np.ndarray) -> Circuit:
        thetas = np.asarray(thetas, dtype=float)
        if thetas.shape != (len(self.hops),):
            raise ValidationError(f"expected {len(self.hops)} hop angles")
        gates = tuple(Gate("hop", pair, float(t)) for pair, t in zip(self.hops, thetas))
        return Circuit(self.n_qubits, gates)


def brick_wall_layout(n_qubits: int, n_hops: int | None = None) -> AnsatzLayout:
    """Alternating even/odd layers of hop gates, truncated to n_hops.

    The default hop counts reproduce the hardware ansatz sizes:
    1, 2, 6, and 12 hops on 2, 4, 6, and 8 qubits.
    """
    if n_qubits < 2:
        raise ValidationError("need at least two qubits for hop gates")
    if n_hops is None:
        n_hops = _DEFAULT_HOPS.get(n_qubits, 2 * (n_qubits - 1))
    pairs: list[tuple[int, int]] = []
    layer = 0
    while len(pairs) < n_hops:
        start = layer % 2
        row = [(a, a + 1) for a in range(start, n_qubits - 1, 2)]
        if not row:
            layer += 1
            continue
        pairs.extend(row[: n_hops - len(pairs)])
        layer += 1
    return AnsatzLayout(n_qubits, tuple(pairs))


def prepare_bitstring(bits: tuple[int, ...]) -> np.ndarray:
    """Computational basis state |bits>."""
    n = len(bits)
    state = np.zeros(1 << n, dtype=complex)
    state[mask_to_axis_index(bits_to_mask(bits), n)] = 1.0
    return state


def prepare_superposition(bits_k: tuple[int, ...], bits_l: tuple[int, ...], p: int) -> np.ndarray:
    """The phase-indexed superposition (|x_k> + i^p |x_l>) / sqrt(2).

    When the bitstrings differ on exactly two positions this is what the
    X gates plus the two-qubit init unitary produce; pairs differing on
    more positions are built directly as amplitudes.
    """
    n = len(bits_k)
    if len(bits_l) != n:
        raise ValidationError("bitstring lengths differ")
    if bits_k == bits_l:
        raise ValidationError("superposition needs distinct bitstrings")
    if p not in (0, 1, 2, 3):
        raise ValidationError("superposition phase index must be 0..3")
    diff = [i for i in range(n) if bits_k[i] != bits_l[i]]
    if len(diff) == 2 and bits_k[diff[0]] + bits_k[diff[1]] == 1:
        hot = diff[0] if bits_k[diff[0]] == 1 else diff[1]
        cold = diff[1] if hot == diff[0] else diff[0]
        gates = [Gate("x", (i,)) for i in range(n) if bits_k[i] == 1 and i != hot]
        gates.append(Gate("sprep", (hot, cold), p))
        circuit = Circuit(n, tuple(gates))
        vacuum = np.zeros(1 << n, dtype=complex)
        vacuum[0] = 1.0
        return apply_circuit(circuit, vacuum)
    state = np.zeros(1 << n, dtype=complex)
    state[mask_to_axis_index(bits_to_mask(bits_k), n)] = 1.0 / np.sqrt(2.0)
    state[mask_to_axis_index(bits_to_mask(bits_l), n)] += (1j ** p) / np.sqrt(2.0)
    return state


def prepare_initial_state(kind: str, bitstrings, p: int = 0) -> np.ndarray:
    """Named state preparations used by the forged estimator.

    kind "bitstring": bitstrings is one occupation tuple.
    kind "superposition": bitstrings is a pair (x_k, x_l); p picks the
    relative phase i^p.
    """
    if kind == "bitstring":
        return prepare_bitstring(tuple(bitstrings))
    if kind == "superposition":
        bits_k, bits_l = bitstrings
        return prepare_superposition(tuple(bits_k), tuple(bits_l), p)
    raise ValidationError(f"unknown preparation kind {kind!r}")


@dataclass(frozen=True)
class ResourceCount:
    """Gate and circuit counts for one forged tomography experiment.

    Gate totals follow the per-circuit accounting convention for the
    deepest (superposition) circuit: 4 single + 1 two-qubit gates per
    init unitary, 4 + 3 per hop gate, and 2 + 0 per measured qubit.
    """

    single_qubit: int
    two_qubit: int
    n_circuits: int
    n_preparations: int


def count_resources(layout: AnsatzLayout, n_bitstrings: int) -> ResourceCount:
    """Resources for tomographing a forged state with K bitstrings.

    Each of the K diagonal and 4 * C(K, 2) superposition preparations is
    measured in all 3^n Pauli bases.
    """
    if n_bitstrings < 1:
        raise ValidationError("need at least one bitstring")
    k = n_bitstrings
    n = layout.n_qubits
    h = layout.n_hops
    u = 1 if k > 1 else 0
    preparations = k + 2 * k * (k - 1)
    single = GATES_PER_INIT_UNITARY[0] * u + GATES_PER_HOP[0] * h + GATES_PER_MEASURED_QUBIT[0] * n
    two = GATES_PER_INIT_UNITARY[1] * u + GATES_PER_HOP[1] * h + GATES_PER_MEASURED_QUBIT[1] * n
    return ResourceCount(single, two, preparations * 3 ** n, preparations)
