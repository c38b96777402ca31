"""Regenerate the bundled integral fixtures.

Run from the repository root:

    python3 fixtures/generate_fixtures.py

The molecular 2-orbital case uses the textbook minimal-basis H2
integrals at the equilibrium bond length.  The larger cases are
synthetic chains: tridiagonal one-body terms with ascending site
energies, and two-body integrals assembled from a seeded symmetric
low-rank factorization so the full 8-fold permutation symmetry holds by
construction.  The *_active files are derived from their full-space
parents by freezing the lowest orbital(s); they are written so the
window bookkeeping can be validated against an independent reduction.
"""

import pathlib

import numpy as np

from forgechem import (
    ActiveSpaceHamiltonian,
    fci_ground_state,
    parse_fcidump,
    reduce_to_window,
    write_fcidump,
)

HERE = pathlib.Path(__file__).parent


def h2_molecule() -> ActiveSpaceHamiltonian:
    """Minimal-basis H2 at R = 1.401 bohr, MO basis."""
    h1 = np.array([[-1.252477, 0.0], [0.0, -0.475934]])
    h2 = np.zeros((2, 2, 2, 2))
    h2[0, 0, 0, 0] = 0.674493
    h2[1, 1, 1, 1] = 0.697397
    coulomb = 0.663472
    exchange = 0.181287
    for p, q in ((0, 1), (1, 0)):
        h2[p, p, q, q] = coulomb
        h2[p, q, p, q] = exchange
        h2[p, q, q, p] = exchange
    return ActiveSpaceHamiltonian(
        n_orbitals=2, n_alpha=1, n_beta=1,
        h1=h1, h2=h2, e_core=0.713176)


def synthetic_chain(n: int, nelec: int, seed: int,
                    diag_start: float = -1.8,
                    diag_step: float = 0.4,
                    hop: float = -0.35) -> ActiveSpaceHamiltonian:
    """Correlated chain with seeded low-rank two-body integrals.

    h2[p,q,r,s] = sum_g L_g[p,q] L_g[r,s] with symmetric factors L_g,
    which guarantees (pq|rs) = (qp|rs) = (rs|pq) and keeps the Coulomb
    supermatrix positive semidefinite.  The leading factor is diagonal
    so on-site repulsion dominates; the rest are small random symmetric
    matrices that break any accidental spatial symmetry.
    """
    rng = np.random.default_rng(seed)

    h1 = np.zeros((n, n))
    for p in range(n):
        h1[p, p] = diag_start + diag_step * p
    for p in range(n - 1):
        h1[p, p + 1] = h1[p + 1, p] = hop + rng.uniform(-0.02, 0.02)

    onsite = np.sqrt(0.70 + 0.05 * np.arange(n))
    factors = [np.diag(onsite)]
    for _ in range(n):
        raw = rng.normal(scale=0.10, size=(n, n))
        factors.append((raw + raw.T) / 2.0)
    h2 = np.zeros((n, n, n, n))
    for factor in factors:
        h2 += np.einsum("pq,rs->pqrs", factor, factor)

    return ActiveSpaceHamiltonian(
        n_orbitals=n, n_alpha=nelec // 2, n_beta=nelec - nelec // 2,
        h1=h1, h2=h2, e_core=0.5 + 0.1 * n)


def layered_chain(n: int, nelec: int, seed: int) -> ActiveSpaceHamiltonian:
    """Chain with a deep core-like first orbital and a high last orbital.

    Used for the perturbative fixtures: freezing orbital 0 leaves a
    well-separated active window, so the zeroth-order gaps are large and
    no intruder handling is exercised by default.
    """
    ham = synthetic_chain(n, nelec, seed, diag_start=-1.2, diag_step=0.45)
    h1 = ham.h1.copy()
    h1[0, 0] = -4.0
    h1[n - 1, n - 1] = 1.6
    return ActiveSpaceHamiltonian(
        n_orbitals=n, n_alpha=ham.n_alpha, n_beta=ham.n_beta,
        h1=h1, h2=ham.h2, e_core=ham.e_core)


def report(name: str, ham: ActiveSpaceHamiltonian) -> None:
    energies, states = fci_ground_state(ham, n_states=2)
    mask_a, mask_b = states[0].dominant_determinant()
    print(f"{name}: E0 = {energies[0]:.8f}  E1 = {energies[1]:.8f}  "
          f"dominant = ({mask_a:0{ham.n_orbitals}b}, {mask_b:0{ham.n_orbitals}b})")


def main() -> None:
    fixtures = {
        "h2_molecule.fcidump": h2_molecule(),
        "chain4.fcidump": synthetic_chain(4, 4, seed=7),
        "chain6.fcidump": synthetic_chain(6, 6, seed=11),
        "layered4.fcidump": layered_chain(4, 4, seed=19),
        "layered6.fcidump": layered_chain(6, 6, seed=23),
    }
    windows = {
        "layered4.fcidump": ("layered4_active.fcidump", (1, 3)),
        "layered6.fcidump": ("layered6_active.fcidump", (1, 5)),
    }

    for name, ham in fixtures.items():
        path = HERE / name
        write_fcidump(ham, path)
        parsed = parse_fcidump(path)
        assert np.allclose(parsed.h1, ham.h1, atol=1e-12)
        assert np.allclose(parsed.h2, ham.h2, atol=1e-12)
        report(name, parsed)
        if name in windows:
            active_name, window = windows[name]
            active = reduce_to_window(ham, window)
            write_fcidump(active, HERE / active_name)
            report(active_name, parse_fcidump(HERE / active_name))


if __name__ == "__main__":
    main()
