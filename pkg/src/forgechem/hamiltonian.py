"""Active-space electronic Hamiltonians and FCIDUMP round-trip I/O.

Two-electron integrals are held in chemists' notation, h2[p, q, r, s] =
(pq|rs), with the full 8-fold permutation symmetry enforced on input.
All orbital indices are 0-based in memory and 1-based on disk.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_SYM_TOL = 1e-10
_WRITE_TOL = 1e-16


@dataclass(frozen=True)
class ActiveSpaceHamiltonian:
    """One- and two-electron integrals over an orbital window.

    Attributes:
        n_orbitals: number of spatial orbitals N.
        n_alpha, n_beta: electrons of each spin in the window.
        h1: (N, N) one-electron integrals, symmetric.
        h2: (N, N, N, N) two-electron integrals (pq|rs), 8-fold symmetric.
        e_core: scalar core energy added to every electronic energy.
    """

    n_orbitals: int
    n_alpha: int
    n_beta: int
    h1: np.ndarray
    h2: np.ndarray
    e_core: float

    def __post_init__(self):
        n = self.n_orbitals
        if n < 1:
            raise ValidationError("need at least one orbital")
        if not (0 <= self.n_alpha <= n and 0 <= self.n_beta <= n):
            raise ValidationError("electron counts outside the orbital window")
        if self.h1.shape != (n, n):
            raise ValidationError("h1 shape mismatch")
        if self.h2.shape != (n, n, n, n):
            raise ValidationError("h2 shape mismatch")
        if np.max(np.abs(self.h1 - self.h1.T)) > _SYM_TOL:
            raise ValidationError("h1 is not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.max(np.abs(self.h2 - self.h2.transpose(perm))) > _SYM_TOL:
                raise ValidationError("h2 violates 8-fold permutation symmetry")

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    @property
    def ms2(self) -> int:
        return self.n_alpha - self.n_beta


def _set_h2(h2: np.ndarray, i: int, j: int, k: int, l: int, value: float):
    for p, q, r, s in (
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    ):
        h2[p, q, r, s] = value


def parse_fcidump(path: str) -> ActiveSpaceHamiltonian:
    """Parse a Molpro-style FCIDUMP file.

    The namelist header is read leniently (comma or whitespace
    separated).  Body rows follow the usual index-0 conventions:
    four zero indices carry the core energy, two trailing zeros carry
    one-electron integrals, and rows with a single orbital index are
    orbital energies, which are ignored.
    """
    with open(path) as handle:
        text = handle.read()

    match = re.search(r"(&END|/)", text, re.IGNORECASE)
    if match is None or not text.lstrip().upper().startswith("&FCI"):
        raise ValidationError(f"{path}: missing FCIDUMP namelist header")
    header, body = text[: match.start()], text[match.end():]

    def header_int(name: str) -> int:
        got = re.search(rf"{name}\s*=\s*([+-]?\d+)", header, re.IGNORECASE)
        if got is None:
            raise ValidationError(f"{path}: header lacks {name}")
        return int(got.group(1))

    n_orb = header_int("NORB")
    n_elec = header_int("NELEC")
    ms2 = header_int("MS2")
    if (n_elec + ms2) % 2 != 0:
        raise ValidationError(f"{path}: NELEC and MS2 have mismatched parity")
    n_alpha = (n_elec + ms2) // 2
    n_beta = (n_elec - ms2) // 2

    h1 = np.zeros((n_orb, n_orb))
    h2 = np.zeros((n_orb, n_orb, n_orb, n_orb))
    e_core = 0.0

    for line in body.splitlines():
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise ValidationError(f"{path}: malformed integral row {line!r}")
        try:
            value = float(fields[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError:
            raise ValidationError(f"{path}: non-numeric integral row {line!r}") from None
        if min(i, j, k, l) < 0 or max(i, j, k, l) > n_orb:
            raise ValidationError(f"{path}: orbital index out of range in {line!r}")
        if i == j == k == l == 0:
            e_core = value
        elif k == l == 0 and i > 0 and j > 0:
            h1[i - 1, j - 1] = value
            h1[j - 1, i - 1] = value
        elif j == k == l == 0:
            continue  # orbital energy row
        elif min(i, j, k, l) > 0:
            _set_h2(h2, i - 1, j - 1, k - 1, l - 1, value)
        else:
            raise ValidationError(f"{path}: unsupported index pattern in {line!r}")

    return ActiveSpaceHamiltonian(n_orb, n_alpha, n_beta, h1, h2, e_core)


def write_fcidump(ham: ActiveSpaceHamiltonian, path: str):
    """Write an FCIDUMP carrying the 8-fold-unique integrals."""
    n = ham.n_orbitals
    lines = [
        f"&FCI NORB={n:3d},NELEC={ham.n_electrons:3d},MS2={ham.ms2:2d},",
        "  ORBSYM=" + "1," * n,
        "  ISYM=1,",
        "&END",
    ]

    def row(value: float, i: int, j: int, k: int, l: int) -> str:
        return f" {value: .16e} {i:4d} {j:4d} {k:4d} {l:4d}"

    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    value = ham.h2[i, j, k, l]
                    if abs(value) > _WRITE_TOL:
                        lines.append(row(value, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            if abs(ham.h1[i, j]) > _WRITE_TOL:
                lines.append(row(ham.h1[i, j], i + 1, j + 1, 0, 0))
    lines.append(row(ham.e_core, 0, 0, 0, 0))

    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def reduce_to_window(full: ActiveSpaceHamiltonian, window: tuple[int, int]) -> ActiveSpaceHamiltonian:
    """Fold a full-space Hamiltonian onto a contiguous orbital window.

    Orbitals below the window are treated as a doubly occupied core and
    folded into the one-electron integrals and the core energy; orbitals
    above the window are dropped.  The electrons of the window are the
    full count minus the core electrons.
    """
    start, stop = window
    n = full.n_orbitals
    if not (0 <= start < stop <= n):
        raise ValidationError("window outside the orbital range")
    core = list(range(start))
    n_alpha = full.n_alpha - len(core)
    n_beta = full.n_beta - len(core)
    if n_alpha < 0 or n_beta < 0:
        raise ValidationError("window core holds more electrons than available")
    if n_alpha > stop - start or n_beta > stop - start:
        raise ValidationError("window too small for the remaining electrons")

    h1 = full.h1[start:stop, start:stop].copy()
    h2 = full.h2[start:stop, start:stop, start:stop, start:stop].copy()
    for i in core:
        h1 += 2.0 * full.h2[start:stop, start:stop, i, i]
        h1 -= full.h2[start:stop, i, i, start:stop]

    e_core = full.e_core
    for i in core:
        e_core += 2.0 * full.h1[i, i]
        for j in core:
            e_core += 2.0 * full.h2[i, i, j, j] - full.h2[i, j, j, i]

    return ActiveSpaceHamiltonian(stop - start, n_alpha, n_beta, h1, h2, e_core)
