"""Run-config parsing, validation, and flag overrides."""

import json
from pathlib import Path

import pytest

from forgechem.config import (
    AnsatzConfig,
    PT2Config,
    QSEConfig,
    RunConfig,
    TomographyConfig,
    config_from_dict,
    load_config,
    override_config,
)
from forgechem.errors import ValidationError


def write_config(tmp_path: Path, body: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(body)
    return path


def full_toml(fixture_dir: Path) -> str:
    return f"""
label = "layered"

[files]
fcidump = "{fixture_dir}/layered4_active.fcidump"
full_fcidump = "{fixture_dir}/layered4.fcidump"

[ansatz]
bitstrings = 2
hops = 1
seed = 7
restarts = 3
max_evaluations = 500

[tomography]
shots = 2048
seeds = 4
base_seed = 11

[qse]
enabled = true
cutoff = 1e-7
project_first = false

[pt2]
enabled = true
window = [1, 3]
threshold = 1e-9

[output]
directory = "out"
"""


def test_round_trip_of_a_fully_specified_config(tmp_path, fixture_dir):
    path = write_config(tmp_path, full_toml(fixture_dir))
    config = load_config(path)
    assert config.label == "layered"
    assert config.active_ham.n_orbitals == 2
    assert config.full_ham.n_orbitals == 4
    assert config.ansatz == AnsatzConfig(
        n_bitstrings=2, n_hops=1, seed=7, restarts=3, max_evaluations=500)
    assert config.tomography == TomographyConfig(shots=2048, n_seeds=4, base_seed=11)
    assert config.qse == QSEConfig(enabled=True, cutoff=1e-7, project_first=False)
    assert config.pt2 == PT2Config(enabled=True, window=(1, 3),
                                   degeneracy_threshold=1e-9)
    assert config.output_dir == (tmp_path / "out").resolve()


def test_minimal_config_uses_defaults(tmp_path, fixture_dir):
    path = write_config(
        tmp_path, f'[files]\nfcidump = "{fixture_dir}/h2_molecule.fcidump"\n')
    config = load_config(path)
    assert config.label == "run"
    assert config.ansatz == AnsatzConfig()
    assert config.tomography == TomographyConfig()
    assert config.qse == QSEConfig()
    assert config.pt2 == PT2Config()
    assert config.full_ham is None
    assert config.output_dir is None


def test_unknown_keys_are_rejected_per_section(tmp_path, fixture_dir):
    head = f'[files]\nfcidump = "{fixture_dir}/h2_molecule.fcidump"\n'
    cases = [
        'banana = 1\n' + head,
        head + '[ansatz]\nlayers = 2\n',
        head + '[tomography]\nrepeats = 5\n',
        head + '[qse]\ntolerance = 0.1\n',
        head + '[pt2]\nwindows = [1, 2]\n',
        head + '[output]\nfolder = "x"\n',
        head.replace("fcidump =", "path ="),
    ]
    for body in cases:
        with pytest.raises(ValidationError, match="unknown keys|must name"):
            load_config(write_config(tmp_path, body))


def test_missing_and_malformed_inputs(tmp_path, fixture_dir):
    with pytest.raises(ValidationError, match="not found"):
        load_config(tmp_path / "absent.toml")
    with pytest.raises(ValidationError, match="does not parse"):
        load_config(write_config(tmp_path, "label = [unclosed\n"))
    with pytest.raises(ValidationError, match="integral file not found"):
        load_config(write_config(tmp_path, '[files]\nfcidump = "missing.fcidump"\n'))
    body = (f'[files]\nfcidump = "{fixture_dir}/h2_molecule.fcidump"\n'
            'full_fcidump = "missing.fcidump"\n')
    with pytest.raises(ValidationError, match="integral file not found"):
        load_config(write_config(tmp_path, body))


def test_value_range_validation(tmp_path, fixture_dir):
    head = f'[files]\nfcidump = "{fixture_dir}/h2_molecule.fcidump"\n'
    cases = [
        head + "[ansatz]\nbitstrings = 0\n",
        head + "[ansatz]\nhops = -1\n",
        head + "[ansatz]\nmax_evaluations = 0\n",
        head + "[tomography]\nshots = -5\n",
        head + "[tomography]\nseeds = 0\n",
        head + "[qse]\ncutoff = 0.0\n",
        head + "[pt2]\nenabled = true\n",
        head + "[pt2]\nwindow = [2, 1]\n[pt2.x]\n",
        head + "[pt2]\nwindow = 3\n",
        head + "[pt2]\nwindow = [1, 2, 3]\n",
        head + "[pt2]\nthreshold = 0.0\n",
    ]
    for body in cases:
        with pytest.raises(ValidationError):
            load_config(write_config(tmp_path, body))


def test_window_consistency_checks(tmp_path, fixture_dir):
    active = f"{fixture_dir}/layered4_active.fcidump"
    full = f"{fixture_dir}/layered4.fcidump"
    no_full = (f'[files]\nfcidump = "{active}"\n'
               "[pt2]\nenabled = true\nwindow = [1, 3]\n")
    with pytest.raises(ValidationError, match="full-space integrals"):
        load_config(write_config(tmp_path, no_full))
    both = f'[files]\nfcidump = "{active}"\nfull_fcidump = "{full}"\n'
    with pytest.raises(ValidationError, match="exceeds"):
        load_config(write_config(tmp_path, both + "[pt2]\nenabled = true\nwindow = [3, 5]\n"))
    with pytest.raises(ValidationError, match="window size"):
        load_config(write_config(tmp_path, both + "[pt2]\nenabled = true\nwindow = [0, 3]\n"))
    mismatched = (f'[files]\nfcidump = "{fixture_dir}/h2_molecule.fcidump"\n'
                  f'full_fcidump = "{full}"\n'
                  "[pt2]\nenabled = true\nwindow = [1, 3]\n")
    with pytest.raises(ValidationError, match="not the stated window"):
        load_config(write_config(tmp_path, mismatched))


def test_overrides_replace_only_named_fields(tmp_path, fixture_dir):
    config = load_config(write_config(tmp_path, full_toml(fixture_dir)))
    updated = override_config(
        config, shots=128, seeds=2, base_seed=3, qse_cutoff=1e-5,
        project_first=True, label="override", output_dir=str(tmp_path / "alt"))
    assert updated.tomography == TomographyConfig(shots=128, n_seeds=2, base_seed=3)
    assert updated.qse == QSEConfig(enabled=True, cutoff=1e-5, project_first=True)
    assert updated.label == "override"
    assert updated.output_dir == tmp_path / "alt"
    assert updated.ansatz == config.ansatz
    assert updated.pt2 == config.pt2
    untouched = override_config(config)
    assert untouched == config


def test_exact_override_zeroes_shots(tmp_path, fixture_dir):
    config = load_config(write_config(tmp_path, full_toml(fixture_dir)))
    assert override_config(config, exact=True).tomography.shots == 0
    # an explicit shot count wins over the exact flag
    assert override_config(config, exact=True, shots=64).tomography.shots == 64
    with pytest.raises(ValidationError):
        override_config(config, qse_cutoff=-1.0)
    with pytest.raises(ValidationError):
        override_config(config, shots=-2)


def test_public_dict_is_json_ready(tmp_path, fixture_dir):
    config = load_config(write_config(tmp_path, full_toml(fixture_dir)))
    payload = config.public_dict()
    text = json.dumps(payload, sort_keys=True)
    back = json.loads(text)
    assert back["label"] == "layered"
    assert back["pt2"]["window"] == [1, 3]
    assert back["fcidump"].endswith("layered4_active.fcidump")
    assert back["qse"]["cutoff"] == pytest.approx(1e-7)
    minimal = load_config(write_config(
        tmp_path, f'[files]\nfcidump = "{fixture_dir}/h2_molecule.fcidump"\n'))
    assert minimal.public_dict()["full_fcidump"] is None
    assert minimal.public_dict()["pt2"]["window"] is None
