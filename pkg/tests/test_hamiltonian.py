"""Integral-file parsing, symmetry validation, and window reduction."""

import numpy as np
import pytest

from forgechem.hamiltonian import (
    ActiveSpaceHamiltonian,
    parse_fcidump,
    reduce_to_window,
    write_fcidump,
)
from forgechem.errors import ValidationError


def random_hamiltonian(rng, n, n_alpha=None, n_beta=None, e_core=0.0):
    """Random integrals with the full 8-fold two-electron symmetry."""
    h1 = rng.normal(size=(n, n))
    h1 = 0.5 * (h1 + h1.T)
    h2 = rng.normal(size=(n, n, n, n))
    h2 = h2 + h2.transpose(1, 0, 2, 3)
    h2 = h2 + h2.transpose(0, 1, 3, 2)
    h2 = h2 + h2.transpose(2, 3, 0, 1)
    if n_alpha is None:
        n_alpha = n // 2
    if n_beta is None:
        n_beta = n_alpha
    return ActiveSpaceHamiltonian(n, n_alpha, n_beta, h1, h2, e_core)


def test_core_only_dump(tmp_path):
    text = (
        "&FCI NORB=2,NELEC=2,MS2=0,\n"
        " ORBSYM=1,1,\n"
        " ISYM=1,\n"
        "&END\n"
        "  0.5000000000000000    0    0    0    0\n"
    )
    path = tmp_path / "core.fcidump"
    path.write_text(text)
    ham = parse_fcidump(path)
    assert ham.e_core == 0.5
    assert ham.n_orbitals == 2 and ham.n_alpha == 1 and ham.n_beta == 1
    np.testing.assert_array_equal(ham.h1, np.zeros((2, 2)))
    np.testing.assert_array_equal(ham.h2, np.zeros((2, 2, 2, 2)))


def test_hubbard_style_symmetry_expansion(tmp_path):
    # one stored entry per (pp|pp) and per hop must expand symmetrically
    text = (
        "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n"
        " 4.0  1 1 1 1\n"
        " 4.0  2 2 2 2\n"
        "-1.0  1 2 0 0\n"
    )
    path = tmp_path / "hubbard.fcidump"
    path.write_text(text)
    ham = parse_fcidump(path)
    assert ham.h2[0, 0, 0, 0] == 4.0
    assert ham.h2[1, 1, 1, 1] == 4.0
    assert ham.h1[0, 1] == -1.0 and ham.h1[1, 0] == -1.0
    # all mixed two-electron entries stay zero
    mixed = ham.h2.copy()
    mixed[0, 0, 0, 0] = mixed[1, 1, 1, 1] = 0.0
    assert np.max(np.abs(mixed)) == 0.0


def test_d_exponent_notation(tmp_path):
    text = "&FCI NORB=1,NELEC=2,MS2=0,\n&END\n 1.5D-01  1 1 0 0\n"
    path = tmp_path / "dexp.fcidump"
    path.write_text(text)
    ham = parse_fcidump(path)
    assert ham.h1[0, 0] == pytest.approx(0.15, abs=1e-15)


def test_round_trip_random_integrals(tmp_path):
    rng = np.random.default_rng(11)
    ham = random_hamiltonian(rng, 4, e_core=0.25)
    path = tmp_path / "random.fcidump"
    write_fcidump(ham, path)
    back = parse_fcidump(path)
    assert (back.n_orbitals, back.n_alpha, back.n_beta) == (4, 2, 2)
    np.testing.assert_allclose(back.h1, ham.h1, atol=1e-12)
    np.testing.assert_allclose(back.h2, ham.h2, atol=1e-12)
    assert back.e_core == pytest.approx(ham.e_core, abs=1e-12)


def test_bundled_fixtures_have_symmetric_integrals(fixture_dir):
    for name in ("h2_molecule", "chain4", "layered4", "layered4_active"):
        ham = parse_fcidump(fixture_dir / f"{name}.fcidump")
        np.testing.assert_allclose(ham.h1, ham.h1.T, atol=1e-12)
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            np.testing.assert_allclose(ham.h2, ham.h2.transpose(perm), atol=1e-12)


def test_asymmetric_h1_rejected():
    h1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        ActiveSpaceHamiltonian(2, 1, 1, h1, np.zeros((2, 2, 2, 2)), 0.0)


def test_broken_h2_symmetry_rejected():
    h2 = np.zeros((2, 2, 2, 2))
    h2[0, 1, 0, 0] = 0.3  # no symmetric partners
    with pytest.raises(ValidationError):
        ActiveSpaceHamiltonian(2, 1, 1, np.zeros((2, 2)), h2, 0.0)


def test_missing_header_rejected(tmp_path):
    path = tmp_path / "broken.fcidump"
    path.write_text("NORB=2\n 1.0 1 1 0 0\n")
    with pytest.raises(ValidationError):
        parse_fcidump(path)


def test_index_out_of_range_rejected(tmp_path):
    path = tmp_path / "oob.fcidump"
    path.write_text("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0  3 1 0 0\n")
    with pytest.raises(ValidationError):
        parse_fcidump(path)


def test_non_numeric_value_rejected(tmp_path):
    path = tmp_path / "nan.fcidump"
    path.write_text("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n abc  1 1 0 0\n")
    with pytest.raises(ValidationError):
        parse_fcidump(path)


def test_window_reduction_matches_fold_formula():
    rng = np.random.default_rng(13)
    full = random_hamiltonian(rng, 5, n_alpha=2, n_beta=2, e_core=0.4)
    window = (1, 4)
    got = reduce_to_window(full, window)

    start, stop = window
    core = range(start)
    active = slice(start, stop)
    h1 = full.h1[active, active].copy()
    e_core = full.e_core
    for i in core:
        h1 += 2.0 * full.h2[active, active, i, i] - full.h2[active, i, i, active]
        e_core += 2.0 * full.h1[i, i]
        for j in core:
            e_core += 2.0 * full.h2[i, i, j, j] - full.h2[i, j, j, i]

    assert got.n_orbitals == 3
    assert (got.n_alpha, got.n_beta) == (1, 1)
    np.testing.assert_allclose(got.h1, h1, atol=1e-12)
    np.testing.assert_allclose(got.h2, full.h2[active, active, active, active], atol=1e-12)
    assert got.e_core == pytest.approx(e_core, abs=1e-12)


def test_full_window_is_identity():
    rng = np.random.default_rng(17)
    full = random_hamiltonian(rng, 3, n_alpha=1, n_beta=1, e_core=0.1)
    same = reduce_to_window(full, (0, 3))
    np.testing.assert_allclose(same.h1, full.h1, atol=1e-14)
    np.testing.assert_allclose(same.h2, full.h2, atol=1e-14)
    assert same.e_core == pytest.approx(full.e_core, abs=1e-14)


def test_layered_fixture_matches_committed_window(fixture_dir):
    full = parse_fcidump(fixture_dir / "layered4.fcidump")
    active = parse_fcidump(fixture_dir / "layered4_active.fcidump")
    derived = reduce_to_window(full, (1, 3))
    np.testing.assert_allclose(derived.h1, active.h1, atol=1e-10)
    np.testing.assert_allclose(derived.h2, active.h2, atol=1e-10)
    assert derived.e_core == pytest.approx(active.e_core, abs=1e-10)
