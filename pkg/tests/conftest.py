"""Shared fixtures: parsed integral files, FCI references, cached ansatz runs.

The variational optimizations dominate the suite's runtime, so every
test that needs an optimized ansatz pulls it from a session-scoped
cache instead of re-running the minimizer.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from forgechem import (
    ForgedAnsatz,
    brick_wall_layout,
    fci_ground_state,
    parse_fcidump,
    select_bitstrings,
    spin_factorize,
    vqe_minimize,
)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


def _load(name: str):
    return parse_fcidump(FIXTURE_DIR / f"{name}.fcidump")


@pytest.fixture(scope="session")
def ham_h2():
    return _load("h2_molecule")


@pytest.fixture(scope="session")
def ham_chain4():
    return _load("chain4")


@pytest.fixture(scope="session")
def ham_chain6():
    return _load("chain6")


@pytest.fixture(scope="session")
def ham_layered4():
    return _load("layered4")


@pytest.fixture(scope="session")
def ham_layered4_active():
    return _load("layered4_active")


@pytest.fixture(scope="session")
def ham_layered6():
    return _load("layered6")


@pytest.fixture(scope="session")
def ham_layered6_active():
    return _load("layered6_active")


@pytest.fixture(scope="session")
def fci_h2(ham_h2):
    energies, states = fci_ground_state(ham_h2)
    return float(energies[0]), states[0]


@pytest.fixture(scope="session")
def fci_chain4(ham_chain4):
    energies, states = fci_ground_state(ham_chain4)
    return float(energies[0]), states[0]


@pytest.fixture(scope="session")
def fci_chain6(ham_chain6):
    energies, states = fci_ground_state(ham_chain6)
    return float(energies[0]), states[0]


def optimize(ham, k: int = 2, n_hops: int | None = None, seed: int = 0, restarts: int = 2):
    """Select bitstrings, build the ansatz, and run the minimizer."""
    bitstrings, lambdas0 = select_bitstrings(ham, k)
    ansatz = ForgedAnsatz(brick_wall_layout(ham.n_orbitals, n_hops), bitstrings)
    factorized = spin_factorize(ham)
    result = vqe_minimize(
        ansatz, factorized, lambdas0=lambdas0, seed=seed, restarts=restarts)
    return ansatz, factorized, result


@pytest.fixture(scope="session")
def h2_solution(ham_h2):
    return optimize(ham_h2)


@pytest.fixture(scope="session")
def chain4_solution(ham_chain4):
    return optimize(ham_chain4)


@pytest.fixture(scope="session")
def chain6_solution(ham_chain6):
    return optimize(ham_chain6, restarts=1)


@pytest.fixture(scope="session")
def chain6_solution_k3(ham_chain6):
    return optimize(ham_chain6, k=3, restarts=1)
