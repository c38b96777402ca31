"""Pipeline orchestration: stage wiring, reports, and reproducibility."""

import json
from pathlib import Path

import pytest

from forgechem.config import config_from_dict
from forgechem.errors import SingularOverlapError, StageFailure
from forgechem.pipeline import (
    HARTREE_TO_KCAL,
    barrier_block,
    report_json,
    run_pipeline,
    strip_timings,
    write_outputs,
)


def h2_config(fixture_dir, **sections):
    data = {"files": {"fcidump": "h2_molecule.fcidump"},
            "ansatz": {"restarts": 1}}
    data.update(sections)
    return config_from_dict(data, fixture_dir)


@pytest.fixture(scope="module")
def h2_exact_report(fixture_dir):
    return run_pipeline(h2_config(fixture_dir))


def test_exact_run_reaches_the_oracle(h2_exact_report, fci_h2):
    report = h2_exact_report
    floor, _ = fci_h2
    assert report["fci"]["energy"] == pytest.approx(floor, abs=1e-10)
    assert report["vqe"]["energy"] == pytest.approx(floor, abs=1e-8)
    assert report["vqe"]["converged"]
    assert report["qse"]["energy"] == pytest.approx(floor, abs=1e-8)
    assert report["qse"]["n_operators"] == 4
    assert report["formatted"]["vqe_error_kcal"] == pytest.approx(
        report["vqe"]["error_vs_fci"] * HARTREE_TO_KCAL, abs=1e-12)
    assert "sampling" not in report
    assert "pt2" not in report
    assert set(report["timings"]) == {"oracle", "vqe", "qse"}


def test_report_blocks_are_structured(h2_exact_report):
    report = h2_exact_report
    assert report["resources"] == {
        "single_qubit_gates": 12,
        "two_qubit_gates": 4,
        "n_circuits": 54,
        "n_preparations": 6,
    }
    assert report["label"] == "run"
    assert report["config"]["tomography"]["shots"] == 0
    trace = report["vqe"]["trace"]
    assert trace[0][0] <= trace[-1][0]
    energies = [energy for _, energy in trace]
    assert energies == sorted(energies, reverse=True)
    assert report["vqe"]["energy"] == pytest.approx(energies[-1], abs=1e-12)


def test_sampled_runs_are_reproducible(fixture_dir):
    config = h2_config(fixture_dir,
                       tomography={"shots": 256, "seeds": 3, "base_seed": 9})
    first = run_pipeline(config)
    second = run_pipeline(config)
    threaded = run_pipeline(config, jobs=3)
    text1 = report_json(first, include_timings=False)
    assert text1 == report_json(second, include_timings=False)
    assert text1 == report_json(threaded, include_timings=False)

    block = first["sampling"]
    assert block["shots"] == 256
    assert block["seeds"] == [9, 10, 11]
    for key in ("raw_energy", "purified_energy", "qse_raw_energy",
                "qse_purified_energy"):
        assert len(block[key]["samples"]) == 3
        assert "mean" in block[key] and "std" in block[key]
    assert block["n_fallbacks"] == 0


def test_pt2_stage_builds_on_the_subspace_energy(fixture_dir):
    config = config_from_dict(
        {"files": {"fcidump": "layered4_active.fcidump",
                   "full_fcidump": "layered4.fcidump"},
         "ansatz": {"restarts": 1},
         "tomography": {"shots": 512, "seeds": 2, "base_seed": 5},
         "pt2": {"enabled": True, "window": [1, 3]}},
        fixture_dir)
    report = run_pipeline(config)
    block = report["pt2"]
    assert block["window"] == [1, 3]
    assert block["delta_e"] < 0.0
    assert block["n_terms"] > 0
    assert block["e_total"] == pytest.approx(
        report["qse"]["energy"] + block["delta_e"], abs=1e-12)
    sampled = block["sampled"]
    assert sampled["n_samples"] == 2
    assert len(sampled["samples"]) == 2
    assert sampled["stderr"] >= 0.0
    assert set(report["timings"]) == {"oracle", "vqe", "qse", "sampling", "pt2"}


def test_disabled_stages_leave_no_blocks(tmp_path):
    lines = ["&FCI NORB=8,NELEC=2,MS2=0,", "&END"]
    for i in range(8):
        lines.append(f"  {0.5 * i + 0.2:.10f}    {i + 1}    {i + 1}    0    0")
    for i in range(7):
        lines.append(f"  -0.2000000000    {i + 2}    {i + 1}    0    0")
    lines.append("  0.2500000000    1    2    1    2")
    lines.append("  0.1500000000    2    3    2    3")
    lines.append("  0.7500000000    0    0    0    0")
    (tmp_path / "wide8.fcidump").write_text("\n".join(lines) + "\n")
    config = config_from_dict(
        {"files": {"fcidump": "wide8.fcidump"},
         "ansatz": {"restarts": 0, "max_evaluations": 60},
         "qse": {"enabled": False}},
        tmp_path)
    report = run_pipeline(config)
    assert report["resources"] == {
        "single_qubit_gates": 68,
        "two_qubit_gates": 37,
        "n_circuits": 39366,
        "n_preparations": 6,
    }
    assert "qse" not in report
    assert "qse_error_kcal" not in report["formatted"]
    assert report["vqe"]["energy"] >= report["fci"]["energy"] - 1e-9


def test_stage_failures_carry_context(fixture_dir):
    config = h2_config(fixture_dir, qse={"cutoff": 10.0})
    with pytest.raises(StageFailure) as caught:
        run_pipeline(config)
    failure = caught.value
    assert failure.stage == "qse"
    assert isinstance(failure.__cause__, SingularOverlapError)
    assert "vqe" in failure.report
    assert "qse" not in failure.report
    assert "qse" in str(failure)


def test_report_json_is_canonical(h2_exact_report):
    text = report_json(h2_exact_report)
    assert text.endswith("\n")
    parsed = json.loads(text)
    assert "timings" in parsed
    bare = json.loads(report_json(h2_exact_report, include_timings=False))
    assert "timings" not in bare
    assert strip_timings(h2_exact_report).keys() == bare.keys()
    # keys come out sorted, so equal reports serialize identically
    assert text.index('"config"') < text.index('"fci"') < text.index('"vqe"')


def test_barrier_arithmetic():
    ts = {"vqe": {"energy": -1.0}, "qse": {"energy": -1.1},
          "pt2": {"e_total": -1.15}}
    left = {"vqe": {"energy": -0.4}, "qse": {"energy": -0.45}}
    right = {"vqe": {"energy": -0.5}}
    block = barrier_block(ts, [left, right])
    assert set(block) == {"ef"}
    assert block["ef"]["hartree"] == pytest.approx(-0.1, abs=1e-12)
    assert block["ef"]["kcal_per_mol"] == pytest.approx(
        -0.1 * HARTREE_TO_KCAL, abs=1e-9)

    right["qse"] = {"energy": -0.5}
    right["pt2"] = {"e_total": -0.52}
    left["pt2"] = {"e_total": -0.47}
    full = barrier_block(ts, [left, right])
    assert set(full) == {"ef", "ef_qse", "ef_qse_pt2"}
    assert full["ef_qse"]["hartree"] == pytest.approx(-0.15, abs=1e-12)
    assert full["ef_qse_pt2"]["hartree"] == pytest.approx(-0.16, abs=1e-12)


def test_write_outputs_round_trip(fixture_dir, tmp_path, h2_exact_report):
    config = h2_config(fixture_dir)
    assert write_outputs(config, h2_exact_report) == []
    written = write_outputs(config, h2_exact_report, tmp_path / "out")
    names = [path.name for path in written]
    assert names == ["report.json", "vqe_trace.csv"]
    on_disk = json.loads(written[0].read_text())
    assert on_disk == json.loads(report_json(h2_exact_report))
    lines = written[1].read_text().splitlines()
    assert lines[0] == "evaluation,energy"
    assert len(lines) == len(h2_exact_report["vqe"]["trace"]) + 1
    step, energy = h2_exact_report["vqe"]["trace"][0]
    assert lines[1] == f"{step},{energy:.12f}"
