"""Quantum subspace expansion over particle-conserving excitations.

The expansion basis applies identity, single, and double excitation
operators to a reference state and solves the generalized eigenproblem
H c = S c E in that span.  Matrix elements come either from a CI vector
(sparse determinant-basis operators) or from a reconstructed two-register
density (trace form), so the same solver serves exact, sampled, and
purified inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse

from .determinants import (
    CIVector,
    apply_annihilate,
    apply_create,
    apply_excitation,
    bits_to_mask,
    fock_space_matrix,
    orbital_strings,
    sector_hamiltonian_matrix,
)
from .errors import CapacityError, SingularOverlapError, ValidationError
from .forging import ForgedAnsatz, forged_ci_vector
from .hamiltonian import ActiveSpaceHamiltonian
from .operators import annihilation_sum, creation_sum, excitation_sum
from .purify import assemble_forged_density, extract_ci_vector, project_sector
from .tomography import DensityMatrix, forged_tomography_sweep

_DENSITY_QUBIT_CAP = 8
_EXACT_CUTOFF = 1e-8


@dataclass(frozen=True)
class Excitation:
    """One basis operator, encoded by kind and orbital indices.

    kind "identity": no indices.
    kind "single": a^t_k a_i on the given spin, k > i.
    kind "double_ab": upward alpha single (k, i) times upward beta
    single (b, j), stored as (k, i, b, j).
    kind "double_same": a^t_k a^t_b a_j a_i on one spin, k < b, i < j,
    annihilation pair lexicographically below the creation pair.
    """

    kind: str
    spin: str | None
    indices: tuple[int, ...]

    def label(self) -> str:
        if self.kind == "identity":
            return "1"
        if self.kind == "single":
            k, i = self.indices
            return f"{self.spin}:{k}<-{i}"
        if self.kind == "double_ab":
            k, i, b, j = self.indices
            return f"a:{k}<-{i} b:{b}<-{j}"
        k, b, j, i = self.indices
        return f"{self.spin}{self.spin}:{k}{b}<-{i}{j}"


def _act_single(mask: int, k: int, i: int):
    hit = apply_excitation(mask, k, i)
    if hit is None:
        return None
    new, sign = hit
    return sign, new


def _act_pair(mask: int, k: int, b: int, j: int, i: int):
    """a^t_k a^t_b a_j a_i on one spin string."""
    sign = 1
    for step, op in ((i, apply_annihilate), (j, apply_annihilate),
                     (b, apply_create), (k, apply_create)):
        hit = op(mask, step)
        if hit is None:
            return None
        mask, s = hit
        sign *= s
    return sign, mask


def excitation_action(exc: Excitation, mask_a: int, mask_b: int):
    """Apply the operator to a determinant; None if it annihilates it.

    Alpha and beta factors carry no cross-sector sign because every
    operator moves an even number of fermionic factors past the other
    sector's creation string.
    """
    if exc.kind == "identity":
        return 1, mask_a, mask_b
    if exc.kind == "single":
        k, i = exc.indices
        mask = mask_a if exc.spin == "a" else mask_b
        hit = _act_single(mask, k, i)
        if hit is None:
            return None
        sign, new = hit
        return (sign, new, mask_b) if exc.spin == "a" else (sign, mask_a, new)
    if exc.kind == "double_ab":
        k, i, b, j = exc.indices
        hit_a = _act_single(mask_a, k, i)
        if hit_a is None:
            return None
        hit_b = _act_single(mask_b, b, j)
        if hit_b is None:
            return None
        return hit_a[0] * hit_b[0], hit_a[1], hit_b[1]
    k, b, j, i = exc.indices
    mask = mask_a if exc.spin == "a" else mask_b
    hit = _act_pair(mask, k, b, j, i)
    if hit is None:
        return None
    sign, new = hit
    return (sign, new, mask_b) if exc.spin == "a" else (sign, mask_a, new)


@dataclass(frozen=True)
class ExcitationBasis:
    """Ordered operator list for one particle-number sector."""

    n_orbitals: int
    n_alpha: int
    n_beta: int
    operators: tuple[Excitation, ...]

    def __len__(self) -> int:
        return len(self.operators)

    def labels(self) -> list[str]:
        return [op.label() for op in self.operators]


def build_excitations(n_orbitals: int, n_alpha: int, n_beta: int) -> ExcitationBasis:
    """Identity plus all upward singles and doubles that can act in the sector.

    Upward means every creation index exceeds its annihilation partner
    (singles and the two factors of a mixed-spin double) or the creation
    pair exceeds the annihilation pair lexicographically (same-spin
    doubles), which makes each operator distinct and non-identity.
    """
    if not (0 <= n_alpha <= n_orbitals and 0 <= n_beta <= n_orbitals):
        raise ValidationError("electron counts incompatible with the orbital count")
    singles = [(k, i) for i in range(n_orbitals) for k in range(i + 1, n_orbitals)]
    pairs = [
        (k, b) for k in range(n_orbitals) for b in range(k + 1, n_orbitals)
    ]
    ops: list[Excitation] = [Excitation("identity", None, ())]
    for spin, count in (("a", n_alpha), ("b", n_beta)):
        if count >= 1:
            ops.extend(Excitation("single", spin, s) for s in singles)
    if n_alpha >= 1 and n_beta >= 1:
        ops.extend(
            Excitation("double_ab", None, (k, i, b, j))
            for (k, i) in singles
            for (b, j) in singles
        )
    for spin, count in (("a", n_alpha), ("b", n_beta)):
        if count >= 2:
            ops.extend(
                Excitation("double_same", spin, (k, b, j, i))
                for (i, j) in pairs
                for (k, b) in pairs
                if (i, j) < (k, b)
            )
    return ExcitationBasis(n_orbitals, n_alpha, n_beta, tuple(ops))


def excitation_ci_matrix(
    exc: Excitation, n_orbitals: int, n_alpha: int, n_beta: int
) -> scipy.sparse.csr_matrix:
    """Sparse determinant-basis matrix; each column has at most one entry."""
    strings_a = orbital_strings(n_orbitals, n_alpha)
    strings_b = orbital_strings(n_orbitals, n_beta)
    pos_a = {m: idx for idx, m in enumerate(strings_a)}
    pos_b = {m: idx for idx, m in enumerate(strings_b)}
    nb = len(strings_b)
    dim = len(strings_a) * nb
    rows, cols, data = [], [], []
    for ia, ma in enumerate(strings_a):
        for jb, mb in enumerate(strings_b):
            hit = excitation_action(exc, ma, mb)
            if hit is None:
                continue
            sign, na, nbm = hit
            rows.append(pos_a[na] * nb + pos_b[nbm])
            cols.append(ia * nb + jb)
            data.append(float(sign))
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(dim, dim))


def excitation_qubit_matrix(exc: Excitation, n_orbitals: int) -> np.ndarray:
    """Dense operator on the full two-register Fock space."""
    dim = 1 << n_orbitals
    eye = np.eye(dim)
    if exc.kind == "identity":
        return np.eye(dim * dim)
    if exc.kind == "single":
        k, i = exc.indices
        mat = excitation_sum(k, i, n_orbitals).to_matrix()
        return np.kron(mat, eye) if exc.spin == "a" else np.kron(eye, mat)
    if exc.kind == "double_ab":
        k, i, b, j = exc.indices
        mat_a = excitation_sum(k, i, n_orbitals).to_matrix()
        mat_b = excitation_sum(b, j, n_orbitals).to_matrix()
        return np.kron(mat_a, mat_b)
    k, b, j, i = exc.indices
    product = (
        creation_sum(k, n_orbitals)
        * creation_sum(b, n_orbitals)
        * annihilation_sum(j, n_orbitals)
        * annihilation_sum(i, n_orbitals)
    )
    mat = product.to_matrix()
    return np.kron(mat, eye) if exc.spin == "a" else np.kron(eye, mat)


@dataclass(frozen=True)
class SubspaceProblem:
    """Generalized eigenproblem H c = S c E, core energy folded into H."""

    h: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        if self.h.shape != self.s.shape or self.h.ndim != 2 or self.h.shape[0] != self.h.shape[1]:
            raise ValidationError("H and S must be square and congruent")

    def as_dict(self) -> dict:
        return {
            "h_real": self.h.real.tolist(),
            "h_imag": self.h.imag.tolist(),
            "s_real": self.s.real.tolist(),
            "s_imag": self.s.imag.tolist(),
        }


@dataclass(frozen=True)
class SubspaceSolution:
    energies: np.ndarray
    coefficients: np.ndarray
    retained_rank: int


def refined_ci_vector(
    ci: CIVector, basis: ExcitationBasis, solution: SubspaceSolution
) -> CIVector:
    """Materialize the expansion ground state sum_I c_I O_I |psi>."""
    vector = ci.normalized().amplitudes.reshape(-1)
    total = np.zeros_like(vector)
    for exc, weight in zip(basis.operators, solution.coefficients[:, 0]):
        total += weight * (
            excitation_ci_matrix(exc, basis.n_orbitals, basis.n_alpha, basis.n_beta) @ vector)
    refined = CIVector(
        basis.n_orbitals, basis.n_alpha, basis.n_beta,
        total.reshape(ci.amplitudes.shape))
    return refined.normalized().fix_phase()


def _ci_route(ci: CIVector, ham: ActiveSpaceHamiltonian, basis: ExcitationBasis) -> SubspaceProblem:
    vector = ci.normalized().amplitudes.reshape(-1)
    columns = [
        excitation_ci_matrix(exc, basis.n_orbitals, basis.n_alpha, basis.n_beta) @ vector
        for exc in basis.operators
    ]
    v = np.column_stack(columns)
    h_elec = sector_hamiltonian_matrix(ham)
    s = v.conj().T @ v
    h = v.conj().T @ (h_elec @ v) + ham.e_core * s
    return SubspaceProblem(h, s)


def _density_route(
    rho: DensityMatrix,
    ham: ActiveSpaceHamiltonian,
    basis: ExcitationBasis,
    project_first: bool,
) -> SubspaceProblem:
    n = ham.n_orbitals
    if rho.n_qubits != 2 * n:
        raise ValidationError("density register does not hold two sectors")
    if rho.n_qubits > _DENSITY_QUBIT_CAP:
        raise CapacityError(f"density-route expansion beyond {_DENSITY_QUBIT_CAP} qubits")
    if project_first:
        rho = project_sector(rho, n, ham.n_alpha, ham.n_beta)
    ops = [excitation_qubit_matrix(exc, n) for exc in basis.operators]
    h_fock = fock_space_matrix(ham)
    n_ops = len(ops)
    s = np.zeros((n_ops, n_ops), dtype=complex)
    h = np.zeros((n_ops, n_ops), dtype=complex)
    for col, op_j in enumerate(ops):
        x = op_j @ rho.matrix
        hx = h_fock @ x
        for row, op_i in enumerate(ops):
            s[row, col] = np.vdot(op_i, x)
            h[row, col] = np.vdot(op_i, hx)
    h += ham.e_core * s
    s = 0.5 * (s + s.conj().T)
    h = 0.5 * (h + h.conj().T)
    return SubspaceProblem(h, s)


def subspace_matrices(
    state: Union[CIVector, DensityMatrix],
    ham: ActiveSpaceHamiltonian,
    basis: ExcitationBasis,
    project_first: bool = True,
) -> SubspaceProblem:
    """H_IJ = <O_I psi|H|O_J psi> and S_IJ = <O_I psi|O_J psi>.

    A CI vector is contracted with sparse determinant-basis operators;
    a density uses the trace form Tr[O_I^t H O_J rho], projected onto
    the sector before (default) or after assembly.
    """
    if isinstance(state, CIVector):
        if (state.n_orbitals, state.n_alpha, state.n_beta) != (
            ham.n_orbitals, ham.n_alpha, ham.n_beta,
        ):
            raise ValidationError("state sector does not match the Hamiltonian")
        return _ci_route(state, ham, basis)
    if isinstance(state, DensityMatrix):
        return _density_route(state, ham, basis, project_first)
    raise ValidationError(f"unsupported state type {type(state).__name__}")


def solve_generalized(problem: SubspaceProblem, overlap_cutoff: float = _EXACT_CUTOFF) -> SubspaceSolution:
    """Canonical orthogonalization, then an ordinary eigensolve.

    Overlap eigenvectors below the cutoff are discarded; the retained
    count is reported so rank loss is visible to callers.
    """
    if overlap_cutoff <= 0:
        raise ValidationError("overlap cutoff must be positive")
    s = 0.5 * (problem.s + problem.s.conj().T)
    h = 0.5 * (problem.h + problem.h.conj().T)
    w, u = np.linalg.eigh(s)
    keep = w > overlap_cutoff
    if not np.any(keep):
        raise SingularOverlapError("every overlap eigenvalue fell below the cutoff")
    x = u[:, keep] / np.sqrt(w[keep])
    reduced = x.conj().T @ h @ x
    reduced = 0.5 * (reduced + reduced.conj().T)
    energies, rotated = np.linalg.eigh(reduced)
    return SubspaceSolution(
        energies=energies,
        coefficients=x @ rotated,
        retained_rank=int(np.count_nonzero(keep)),
    )


@dataclass(frozen=True)
class StateSource:
    """How the reference state is acquired for the expansion."""

    kind: str
    shots: int = 0
    seed: int = 0

    @classmethod
    def exact(cls) -> "StateSource":
        return cls("exact")

    @classmethod
    def sampled(cls, shots: int, seed: int = 0) -> "StateSource":
        return cls("shots", shots, seed)

    @classmethod
    def purified(cls, shots: int, seed: int = 0) -> "StateSource":
        return cls("purified", shots, seed)


@dataclass(frozen=True)
class QSEOutcome:
    energy: float
    solution: SubspaceSolution
    problem: SubspaceProblem
    overlap_cutoff: float
    used_fallback: bool


def _sampled_cutoff(blochs) -> float:
    errors = np.concatenate([b.errors[1:] for b in blochs.values()])
    errors = errors[errors > 0]
    if errors.size == 0:
        return _EXACT_CUTOFF
    return 10.0 * float(np.median(errors))


def ef_qse_energy(
    ansatz: ForgedAnsatz,
    ham: ActiveSpaceHamiltonian,
    thetas,
    lambdas,
    source: StateSource = StateSource("exact"),
    overlap_cutoff: float | None = None,
    project_first: bool = True,
) -> QSEOutcome:
    """End-to-end expansion energy from a converged forged ansatz."""
    basis = build_excitations(ham.n_orbitals, ham.n_alpha, ham.n_beta)
    used_fallback = False
    if source.kind == "exact":
        ci = forged_ci_vector(ansatz, thetas, lambdas, ham.n_alpha, ham.n_beta)
        problem = subspace_matrices(ci, ham, basis)
        cutoff = _EXACT_CUTOFF if overlap_cutoff is None else overlap_cutoff
    elif source.kind == "shots":
        blochs = forged_tomography_sweep(ansatz, thetas, source.shots, source.seed)
        rho = assemble_forged_density(blochs, ansatz, lambdas)
        problem = subspace_matrices(rho, ham, basis, project_first=project_first)
        cutoff = _sampled_cutoff(blochs) if overlap_cutoff is None else overlap_cutoff
    elif source.kind == "purified":
        blochs = forged_tomography_sweep(ansatz, thetas, source.shots, source.seed)
        rho = assemble_forged_density(blochs, ansatz, lambdas)
        rho = project_sector(rho, ham.n_orbitals, ham.n_alpha, ham.n_beta)
        reference = (bits_to_mask(ansatz.bitstrings[0]), bits_to_mask(ansatz.bitstrings[0]))
        ci, used_fallback = extract_ci_vector(
            rho, ham.n_orbitals, ham.n_alpha, ham.n_beta, reference)
        problem = subspace_matrices(ci, ham, basis)
        cutoff = _sampled_cutoff(blochs) if overlap_cutoff is None else overlap_cutoff
    else:
        raise ValidationError(f"unknown state source {source.kind!r}")
    solution = solve_generalized(problem, cutoff)
    return QSEOutcome(
        energy=float(solution.energies[0]),
        solution=solution,
        problem=problem,
        overlap_cutoff=cutoff,
        used_fallback=used_fallback,
    )
