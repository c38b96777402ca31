"""Entanglement-forged ansatz states and their energy estimator.

The forged state over two identical sector registers is

    |Psi(theta)> = sum_k lambda_k U(theta)|x_k> (x) U(theta)|x_k>,

with computational bitstrings x_k of equal Hamming weight and a shared
hop-gate circuit U(theta).  For a factorized Hamiltonian
H = sum_mu A_mu (x) B_mu the energy reduces to sector quantities

    E = sum_klmu lambda_k lambda_l A_kl^mu B_kl^mu,
    A_kl^mu = <x_k| U^t A_mu U |x_l>,

where the diagonal entries are plain expectation values and the
off-diagonal ones combine the four phase-indexed superposition states
(|x_k> + i^p |x_l>)/sqrt(2) with weights (-i)^p / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .circuits import AnsatzLayout, apply_circuit, prepare_bitstring, prepare_superposition
from .determinants import CIVector, mask_to_bits
from .errors import NumericalError, ValidationError
from .hamiltonian import ActiveSpaceHamiltonian
from .operators import SpinFactorizedHamiltonian
from .oracle import fci_ground_state

_OFF_DIAGONAL_WEIGHTS = tuple(0.5 * (-1j) ** p for p in range(4))


@dataclass(frozen=True)
class ForgedAnsatz:
    """Hop-gate layout plus the Schmidt bitstrings it dresses."""

    layout: AnsatzLayout
    bitstrings: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.bitstrings:
            raise ValidationError("need at least one bitstring")
        n = self.layout.n_qubits
        weights = set()
        for bits in self.bitstrings:
            if len(bits) != n:
                raise ValidationError("bitstring length does not match the register")
            if any(b not in (0, 1) for b in bits):
                raise ValidationError("bitstrings must be 0/1 tuples")
            weights.add(sum(bits))
        if len(weights) != 1:
            raise ValidationError("bitstrings must share one Hamming weight")
        if len(set(self.bitstrings)) != len(self.bitstrings):
            raise ValidationError("bitstrings must be distinct")

    @property
    def n_bitstrings(self) -> int:
        return len(self.bitstrings)

    @property
    def n_parameters(self) -> int:
        return self.layout.n_hops + self.n_bitstrings

    def preparations(self) -> list[tuple[str, np.ndarray]]:
        """Labelled initial states: K diagonal plus 4 per bitstring pair."""
        preps = [(f"x{k}", prepare_bitstring(bits)) for k, bits in enumerate(self.bitstrings)]
        for k in range(self.n_bitstrings):
            for l in range(k + 1, self.n_bitstrings):
                for p in range(4):
                    label = f"phi{p}" if self.n_bitstrings == 2 else f"phi{p}_{k}{l}"
                    preps.append((label, prepare_superposition(
                        self.bitstrings[k], self.bitstrings[l], p)))
        return preps


def normalized_schmidt(lambdas) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    norm = np.linalg.norm(lam)
    if norm < 1e-12:
        raise ValidationError("Schmidt coefficients cannot all vanish")
    return lam / norm


@dataclass(frozen=True)
class ForgedElements:
    """Sector matrix elements A_kl^mu, B_kl^mu for each factorized term."""

    a: np.ndarray  # (K, K, T)
    b: np.ndarray  # (K, K, T)


def forged_matrix_elements(
    ansatz: ForgedAnsatz,
    factorized: SpinFactorizedHamiltonian,
    thetas: np.ndarray,
) -> ForgedElements:
    """Evaluate every A_kl^mu and B_kl^mu from circuit expectation values."""
    if factorized.n_qubits != ansatz.layout.n_qubits:
        raise ValidationError("Hamiltonian register width does not match the ansatz")
    circuit = ansatz.layout.circuit(thetas)
    k_total = ansatz.n_bitstrings
    terms = factorized.terms
    t_total = len(terms)

    def term_values(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a_vals = np.empty(t_total, dtype=complex)
        b_vals = np.empty(t_total, dtype=complex)
        for t, (a_mu, b_mu, _) in enumerate(terms):
            a_vals[t] = 1.0 if a_mu.is_identity() else a_mu.expectation(state)
            b_vals[t] = 1.0 if b_mu.is_identity() else b_mu.expectation(state)
        return a_vals, b_vals

    a = np.zeros((k_total, k_total, t_total), dtype=complex)
    b = np.zeros((k_total, k_total, t_total), dtype=complex)
    for k, bits in enumerate(ansatz.bitstrings):
        state = apply_circuit(circuit, prepare_bitstring(bits))
        a[k, k], b[k, k] = term_values(state)
    for k in range(k_total):
        for l in range(k + 1, k_total):
            for p, weight in enumerate(_OFF_DIAGONAL_WEIGHTS):
                state = apply_circuit(circuit, prepare_superposition(
                    ansatz.bitstrings[k], ansatz.bitstrings[l], p))
                a_vals, b_vals = term_values(state)
                a[k, l] += weight * a_vals
                b[k, l] += weight * b_vals
            a[l, k] = np.conj(a[k, l])
            b[l, k] = np.conj(b[k, l])
    return ForgedElements(a, b)


def energy_from_elements(
    elements: ForgedElements,
    factorized: SpinFactorizedHamiltonian,
    lambdas: np.ndarray,
) -> float:
    lam = np.asarray(lambdas, dtype=float)
    coeffs = np.array([c for _, _, c in factorized.terms])
    value = np.einsum("k,l,klt,klt,t->", lam, lam, elements.a, elements.b, coeffs)
    if abs(value.imag) > 1e-8:
        raise NumericalError(f"forged energy has imaginary part {value.imag:.2e}")
    return float(value.real) + factorized.e_core


def forged_energy(
    ansatz: ForgedAnsatz,
    factorized: SpinFactorizedHamiltonian,
    thetas: np.ndarray,
    lambdas: np.ndarray,
) -> float:
    """Energy of the forged state; Schmidt coefficients must be normalized."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (ansatz.n_bitstrings,):
        raise ValidationError("one Schmidt coefficient per bitstring")
    if abs(np.linalg.norm(lam) - 1.0) > 1e-8:
        raise ValidationError("Schmidt coefficients must be normalized")
    elements = forged_matrix_elements(ansatz, factorized, thetas)
    return energy_from_elements(elements, factorized, lam)


def forged_statevector(ansatz: ForgedAnsatz, thetas, lambdas) -> np.ndarray:
    """The 2N-qubit statevector of the forged ansatz (alpha register high)."""
    lam = normalized_schmidt(lambdas)
    circuit = ansatz.layout.circuit(np.asarray(thetas, dtype=float))
    dim = 1 << (2 * ansatz.layout.n_qubits)
    state = np.zeros(dim, dtype=complex)
    for coeff, bits in zip(lam, ansatz.bitstrings):
        dressed = apply_circuit(circuit, prepare_bitstring(bits))
        state += coeff * np.kron(dressed, dressed)
    return state


def forged_ci_vector(ansatz: ForgedAnsatz, thetas, lambdas, n_alpha: int, n_beta: int) -> CIVector:
    state = forged_statevector(ansatz, thetas, lambdas)
    ci = CIVector.from_qubit_state(state, ansatz.layout.n_qubits, n_alpha, n_beta)
    return ci.normalized().fix_phase()


@dataclass(frozen=True)
class VQEResult:
    thetas: np.ndarray
    lambdas: np.ndarray
    energy: float
    converged: bool
    n_evaluations: int
    trace: tuple[tuple[int, float], ...]


def vqe_minimize(
    ansatz: ForgedAnsatz,
    factorized: SpinFactorizedHamiltonian,
    thetas0=None,
    lambdas0=None,
    seed: int = 0,
    restarts: int = 2,
    max_evaluations: int = 20000,
    tol: float = 1e-8,
) -> VQEResult:
    """Simplex minimization of the forged energy with seeded restarts.

    The optimization vector stacks the hop angles with one raw Schmidt
    coefficient per bitstring; the coefficients are renormalized on
    every evaluation.  Each start runs Nelder-Mead twice (once from the
    start, once from its own endpoint) and the best endpoint wins.
    """
    n_hops = ansatz.layout.n_hops
    k_total = ansatz.n_bitstrings
    if thetas0 is None:
        thetas0 = np.zeros(n_hops)
    if lambdas0 is None:
        lambdas0 = np.array([1.0] + [0.3] * (k_total - 1))
    x0 = np.concatenate([np.asarray(thetas0, float), normalized_schmidt(lambdas0)])

    evaluations = [0]
    trace: list[tuple[int, float]] = []
    best_seen = [np.inf]

    def objective(x: np.ndarray) -> float:
        lam_raw = x[n_hops:]
        norm = np.linalg.norm(lam_raw)
        if norm < 1e-12:
            return 1e6
        energy = forged_energy(ansatz, factorized, x[:n_hops], lam_raw / norm)
        evaluations[0] += 1
        if energy < best_seen[0] - 1e-15:
            best_seen[0] = energy
            trace.append((evaluations[0], energy))
        return energy

    rng = np.random.default_rng(seed)
    starts = [x0]
    for _ in range(restarts):
        bump = np.concatenate([rng.normal(0.0, 0.5, n_hops), rng.normal(0.0, 0.3, k_total)])
        starts.append(x0 + bump)

    best = None
    converged = False
    for start in starts:
        x_run = start
        for _ in range(2):
            res = optimize.minimize(
                objective, x_run, method="Nelder-Mead",
                options={"maxfev": max_evaluations, "xatol": 1e-7, "fatol": tol,
                         "adaptive": len(start) > 4},
            )
            x_run = res.x
        if best is None or res.fun < best.fun:
            best = res
            converged = bool(res.success)

    lam = normalized_schmidt(best.x[n_hops:])
    return VQEResult(
        thetas=best.x[:n_hops].copy(),
        lambdas=lam,
        energy=float(best.fun),
        converged=converged,
        n_evaluations=evaluations[0],
        trace=tuple(trace),
    )


def select_bitstrings(ham: ActiveSpaceHamiltonian, k: int) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    """Schmidt-dominant computational bitstrings of the FCI ground state.

    The CI matrix over (alpha, beta) strings is symmetric for the
    spin-compensated ground states targeted here; its eigendecomposition
    is the Schmidt decomposition across the spin cut.  For each of the k
    largest-weight Schmidt modes the dominant determinant gives the
    bitstring, so k = 2 returns the mean-field string plus the leading
    excitation.  Returns the bitstrings and signed Schmidt coefficients
    normalized over the selected modes.
    """
    if ham.n_alpha != ham.n_beta:
        raise ValidationError("spin-restricted forging needs n_alpha == n_beta")
    _, states = fci_ground_state(ham)
    ci = states[0].amplitudes.real
    asym = np.max(np.abs(ci - ci.T))
    if asym > 1e-6:
        raise NumericalError(
            f"CI matrix asymmetry {asym:.2e}: ground state is spin-odd and "
            "cannot be forged with shared bitstrings")
    values, vectors = np.linalg.eigh(0.5 * (ci + ci.T))
    order = np.argsort(-np.abs(values))
    values, vectors = values[order], vectors[:, order]
    n_nonzero = int(np.sum(np.abs(values) > 1e-12))
    if not 1 <= k <= n_nonzero:
        raise ValidationError(f"k must be in 1..{n_nonzero} nonzero Schmidt modes")

    strings = states[0].strings_alpha
    chosen: list[tuple[int, ...]] = []
    for mode in range(k):
        for idx in np.argsort(-np.abs(vectors[:, mode])):
            bits = mask_to_bits(strings[int(idx)], ham.n_orbitals)
            if bits not in chosen:
                chosen.append(bits)
                break
        else:
            raise NumericalError("could not assign a distinct bitstring per mode")
    lambdas = values[:k] / np.linalg.norm(values[:k])
    return tuple(chosen), lambdas
