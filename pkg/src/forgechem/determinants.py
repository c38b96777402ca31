"""Determinant-basis representation of fermionic states and operators.

Occupations are integer bitmasks with bit p (1 << p) marking orbital p.
A determinant is an (alpha mask, beta mask) pair; within each spin the
creation operators are ordered by ascending orbital index, with every
alpha operator to the left of every beta operator.  Under that ordering
the spin-summed Hamiltonian never produces signs that cross the spin
boundary, so alpha and beta moves factorize.

The qubit register used elsewhere puts orbital p of a sector on qubit p
with qubit 0 as the most significant index bit; mask_to_axis_index
converts between the two conventions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ValidationError
from .hamiltonian import ActiveSpaceHamiltonian


def orbital_strings(n_orbitals: int, n_elec: int) -> list[int]:
    """All occupation masks of n_elec electrons in n_orbitals, ascending."""
    if not 0 <= n_elec <= n_orbitals:
        raise ValidationError("electron count outside the orbital window")
    masks = [sum(1 << p for p in occ) for occ in combinations(range(n_orbitals), n_elec)]
    return sorted(masks)


def mask_to_axis_index(mask: int, n_orbitals: int) -> int:
    """Occupation mask -> statevector basis index (qubit 0 most significant)."""
    index = 0
    for p in range(n_orbitals):
        if mask & (1 << p):
            index |= 1 << (n_orbitals - 1 - p)
    return index


def axis_index_to_mask(index: int, n_orbitals: int) -> int:
    return mask_to_axis_index(index, n_orbitals)  # the map is its own inverse


def bits_to_mask(bits) -> int:
    """Occupation tuple (x_0, ..., x_{N-1}) -> mask."""
    return sum(1 << p for p, x in enumerate(bits) if x)


def mask_to_bits(mask: int, n_orbitals: int) -> tuple[int, ...]:
    return tuple((mask >> p) & 1 for p in range(n_orbitals))


def _parity_sign(mask: int, p: int) -> int:
    return -1 if (mask & ((1 << p) - 1)).bit_count() & 1 else 1


def apply_create(mask: int, p: int):
    """a_p^dagger |mask>; returns (new_mask, sign) or None."""
    bit = 1 << p
    if mask & bit:
        return None
    return mask | bit, _parity_sign(mask, p)


def apply_annihilate(mask: int, p: int):
    """a_p |mask>; returns (new_mask, sign) or None."""
    bit = 1 << p
    if not mask & bit:
        return None
    return mask ^ bit, _parity_sign(mask, p)


def apply_excitation(mask: int, p: int, q: int):
    """E_pq = a_p^dagger a_q on a mask; returns (new_mask, sign) or None."""
    step = apply_annihilate(mask, q)
    if step is None:
        return None
    mid, sign1 = step
    step = apply_create(mid, p)
    if step is None:
        return None
    out, sign2 = step
    return out, sign1 * sign2


def single_moves(mask: int, n_orbitals: int) -> list[tuple[int, int, int, int]]:
    """All nonzero E_pq |mask> terms as (p, q, new_mask, sign)."""
    moves = []
    for q in range(n_orbitals):
        if not mask & (1 << q):
            continue
        for p in range(n_orbitals):
            step = apply_excitation(mask, p, q)
            if step is not None:
                moves.append((p, q, step[0], step[1]))
    return moves


def hamiltonian_matrix_on(
    ham: ActiveSpaceHamiltonian,
    strings_a: list[int],
    strings_b: list[int],
) -> np.ndarray:
    """Electronic Hamiltonian matrix over an explicit determinant basis.

    Built by direct second-quantized application using the identity

        H = sum_s g_pq E_pq(s) + 1/2 (pq|rs) [sum_s E_pq(s) E_rs(s)]
            + (pq|rs) E_pq(alpha) E_rs(beta),

    with g = h1 - 1/2 sum_t (pt|tq).  The core energy is not included.
    """
    n = ham.n_orbitals
    g = ham.h1 - 0.5 * np.einsum("pttq->pq", ham.h2)
    index_a = {m: i for i, m in enumerate(strings_a)}
    index_b = {m: i for i, m in enumerate(strings_b)}
    moves_a = [single_moves(m, n) for m in strings_a]
    moves_b = [single_moves(m, n) for m in strings_b]
    same_a = [_same_spin_terms(ham, g, m, n, index_a) for m in strings_a]
    same_b = [_same_spin_terms(ham, g, m, n, index_b) for m in strings_b]

    n_b = len(strings_b)
    dim = len(strings_a) * n_b
    mat = np.zeros((dim, dim))

    for ia in range(len(strings_a)):
        cross_a = [(index_a[new_a], pa, qa, sign_a)
                   for pa, qa, new_a, sign_a in moves_a[ia] if new_a in index_a]
        for jb in range(n_b):
            col = ia * n_b + jb
            for ia2, amp in same_a[ia]:
                mat[ia2 * n_b + jb, col] += amp
            for jb2, amp in same_b[jb]:
                mat[ia * n_b + jb2, col] += amp
            # alpha-beta cross term
            for ia2, pa, qa, sign_a in cross_a:
                for rb, sb, new_b, sign_b in moves_b[jb]:
                    jb2 = index_b.get(new_b)
                    if jb2 is not None:
                        mat[ia2 * n_b + jb2, col] += sign_a * sign_b * ham.h2[pa, qa, rb, sb]
    return mat


def _same_spin_terms(ham, g, mask, n, index):
    """One-body plus same-spin two-body amplitudes out of one alpha mask."""
    out: dict[int, float] = {}
    moves = single_moves(mask, n)
    move_cache = {}
    for p, q, new_mask, sign in moves:
        if new_mask in index:
            out[index[new_mask]] = out.get(index[new_mask], 0.0) + sign * g[p, q]
    for r, s, mid, sign1 in moves:
        seconds = move_cache.get(mid)
        if seconds is None:
            seconds = single_moves(mid, n)
            move_cache[mid] = seconds
        for p, q, new_mask, sign2 in seconds:
            target = index.get(new_mask)
            if target is not None:
                out[target] = out.get(target, 0.0) + 0.5 * sign1 * sign2 * ham.h2[p, q, r, s]
    return list(out.items())


def sector_hamiltonian_matrix(ham: ActiveSpaceHamiltonian) -> np.ndarray:
    """Dense electronic Hamiltonian on the (n_alpha, n_beta) sector."""
    strings_a = orbital_strings(ham.n_orbitals, ham.n_alpha)
    strings_b = orbital_strings(ham.n_orbitals, ham.n_beta)
    return hamiltonian_matrix_on(ham, strings_a, strings_b)


def fock_space_matrix(ham: ActiveSpaceHamiltonian) -> np.ndarray:
    """Electronic Hamiltonian over the full Fock basis of both sectors,
    ordered to match the 2N-qubit register (alpha axes then beta axes)."""
    n = ham.n_orbitals
    strings = sorted(range(1 << n), key=lambda m: mask_to_axis_index(m, n))
    return hamiltonian_matrix_on(ham, strings, strings)


@dataclass
class CIVector:
    """CI amplitudes over the canonical (alpha string, beta string) basis.

    amplitudes[ia, jb] multiplies the determinant with the ia-th alpha
    mask and jb-th beta mask of orbital_strings, both ascending.
    """

    n_orbitals: int
    n_alpha: int
    n_beta: int
    amplitudes: np.ndarray

    def __post_init__(self):
        shape = (
            len(orbital_strings(self.n_orbitals, self.n_alpha)),
            len(orbital_strings(self.n_orbitals, self.n_beta)),
        )
        if self.amplitudes.shape != shape:
            raise ValidationError(f"amplitude shape {self.amplitudes.shape} != {shape}")

    @property
    def strings_alpha(self) -> list[int]:
        return orbital_strings(self.n_orbitals, self.n_alpha)

    @property
    def strings_beta(self) -> list[int]:
        return orbital_strings(self.n_orbitals, self.n_beta)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "CIVector":
        norm = self.norm()
        if norm < 1e-12:
            raise ValidationError("cannot normalize a null CI vector")
        return CIVector(self.n_orbitals, self.n_alpha, self.n_beta, self.amplitudes / norm)

    def fix_phase(self, reference: tuple[int, int] | None = None) -> "CIVector":
        """Rotate the global phase so a chosen amplitude is real positive.

        With no reference the largest-magnitude amplitude is used.
        """
        amps = self.amplitudes
        if reference is None:
            flat = np.argmax(np.abs(amps))
            pivot = amps.flat[flat]
        else:
            ia = self.strings_alpha.index(reference[0])
            jb = self.strings_beta.index(reference[1])
            pivot = amps[ia, jb]
        if abs(pivot) < 1e-12:
            return self
        phase = pivot / abs(pivot)
        return CIVector(self.n_orbitals, self.n_alpha, self.n_beta, amps / phase)

    def energy(self, ham: ActiveSpaceHamiltonian) -> float:
        """<psi|H|psi> / <psi|psi> plus the core energy."""
        if (ham.n_orbitals, ham.n_alpha, ham.n_beta) != (self.n_orbitals, self.n_alpha, self.n_beta):
            raise ValidationError("Hamiltonian sector does not match the CI vector")
        mat = sector_hamiltonian_matrix(ham)
        flat = self.amplitudes.reshape(-1)
        raw = np.vdot(flat, mat @ flat) / np.vdot(flat, flat)
        return float(raw.real) + ham.e_core

    def dominant_determinant(self) -> tuple[int, int]:
        ia, jb = np.unravel_index(np.argmax(np.abs(self.amplitudes)), self.amplitudes.shape)
        return self.strings_alpha[int(ia)], self.strings_beta[int(jb)]

    def to_qubit_state(self) -> np.ndarray:
        """Embed into the 2N-qubit register (alpha axes then beta axes)."""
        n = self.n_orbitals
        state = np.zeros(1 << (2 * n), dtype=complex)
        for ia, mask_a in enumerate(self.strings_alpha):
            base = mask_to_axis_index(mask_a, n) << n
            for jb, mask_b in enumerate(self.strings_beta):
                state[base | mask_to_axis_index(mask_b, n)] = self.amplitudes[ia, jb]
        return state

    @classmethod
    def from_qubit_state(
        cls, state: np.ndarray, n_orbitals: int, n_alpha: int, n_beta: int
    ) -> "CIVector":
        """Project a 2N-qubit statevector onto the sector determinant basis."""
        n = n_orbitals
        if state.shape != (1 << (2 * n),):
            raise ValidationError("state dimension mismatch")
        strings_a = orbital_strings(n, n_alpha)
        strings_b = orbital_strings(n, n_beta)
        amps = np.zeros((len(strings_a), len(strings_b)), dtype=complex)
        for ia, mask_a in enumerate(strings_a):
            base = mask_to_axis_index(mask_a, n) << n
            for jb, mask_b in enumerate(strings_b):
                amps[ia, jb] = state[base | mask_to_axis_index(mask_b, n)]
        return cls(n, n_alpha, n_beta, amps)


def one_particle_rdm(ci: CIVector) -> np.ndarray:
    """Spin-summed one-particle density gamma_pq = <sum_s a^t_ps a_qs>.

    Real symmetric for the real-amplitude states produced here; returned
    as the real part after normalizing the input.
    """
    vec = ci.normalized()
    n = vec.n_orbitals
    gamma = np.zeros((n, n), dtype=complex)
    pos_a = {m: idx for idx, m in enumerate(vec.strings_alpha)}
    pos_b = {m: idx for idx, m in enumerate(vec.strings_beta)}
    amps = vec.amplitudes
    for p in range(n):
        for q in range(n):
            total = 0.0 + 0.0j
            for ia, ma in enumerate(vec.strings_alpha):
                hit = apply_excitation(ma, p, q)
                if hit is None:
                    continue
                na, sign = hit
                total += sign * np.vdot(amps[pos_a[na], :], amps[ia, :])
            for jb, mb in enumerate(vec.strings_beta):
                hit = apply_excitation(mb, p, q)
                if hit is None:
                    continue
                nb, sign = hit
                total += sign * np.vdot(amps[:, pos_b[nb]], amps[:, jb])
            gamma[p, q] = total
    return gamma.real
