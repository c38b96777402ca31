"""End-to-end orchestration: VQE, tomography, purification, QSE, PT2.

A pipeline run consumes only the seeds in its config, so two runs of
the same config produce byte-identical numeric reports; wall-clock
timings live in their own block and are excluded from that guarantee.
Energies stay in hartree everywhere, with kcal/mol appearing only in
the formatted report block.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .circuits import brick_wall_layout, count_resources
from .config import RunConfig
from .determinants import sector_hamiltonian_matrix
from .errors import StageFailure
from .forging import ForgedAnsatz, forged_ci_vector, select_bitstrings, vqe_minimize
from .operators import spin_factorize
from .oracle import fci_ground_state
from .pt2 import build_dyall, embed_in_full, pt2_correction, pt2_with_sampling
from .purify import assemble_forged_density, purified_ci_from_blochs, raw_forged_energy
from .qse import (
    _DENSITY_QUBIT_CAP,
    build_excitations,
    refined_ci_vector,
    solve_generalized,
    subspace_matrices,
)
from .tomography import forged_tomography_sweep

HARTREE_TO_KCAL = 627.5094740631
_EXACT_CUTOFF = 1e-8


def _ensemble(values) -> dict:
    arr = np.asarray(values, dtype=float)
    block = {
        "samples": arr.tolist(),
        "mean": float(arr.mean()),
    }
    if arr.size > 1:
        block["std"] = float(arr.std(ddof=1))
    return block


@contextmanager
def _timed(timings: dict, name: str):
    started = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = round(time.perf_counter() - started, 6)


def run_pipeline(config: RunConfig, jobs: int = 1) -> dict:
    """Execute the configured stages and return the structured report.

    Stage failures surface as exceptions carrying the stage name; the
    partial report built so far is attached for inspection.  jobs only
    parallelizes the per-seed sampling loop; results are collected in
    seed order, so the report does not depend on scheduling.
    """
    config.validate()
    report: dict = {"label": config.label, "config": config.public_dict()}
    timings: dict = {}
    stage = "setup"
    try:
        ham = config.active_ham
        layout = brick_wall_layout(ham.n_orbitals, config.ansatz.n_hops)
        resources = count_resources(layout, config.ansatz.n_bitstrings)
        report["resources"] = {
            "single_qubit_gates": resources.single_qubit,
            "two_qubit_gates": resources.two_qubit,
            "n_circuits": resources.n_circuits,
            "n_preparations": resources.n_preparations,
        }

        stage = "oracle"
        with _timed(timings, stage):
            fci_energies, _ = fci_ground_state(ham)
            report["fci"] = {"energy": float(fci_energies[0])}

        stage = "vqe"
        with _timed(timings, stage):
            bitstrings, lambdas0 = select_bitstrings(ham, config.ansatz.n_bitstrings)
            ansatz = ForgedAnsatz(layout, bitstrings)
            factorized = spin_factorize(ham)
            vqe = vqe_minimize(
                ansatz,
                factorized,
                lambdas0=lambdas0,
                seed=config.ansatz.seed,
                restarts=config.ansatz.restarts,
                max_evaluations=config.ansatz.max_evaluations,
            )
            report["vqe"] = {
                "energy": vqe.energy,
                "error_vs_fci": vqe.energy - report["fci"]["energy"],
                "converged": vqe.converged,
                "n_evaluations": vqe.n_evaluations,
                "bitstrings": [list(b) for b in ansatz.bitstrings],
                "thetas": vqe.thetas.tolist(),
                "lambdas": vqe.lambdas.tolist(),
                "trace": [[step, energy] for step, energy in vqe.trace],
            }

        pt2_reference = None
        if config.qse.enabled:
            stage = "qse"
            with _timed(timings, stage):
                basis = build_excitations(ham.n_orbitals, ham.n_alpha, ham.n_beta)
                ci_exact = forged_ci_vector(
                    ansatz, vqe.thetas, vqe.lambdas, ham.n_alpha, ham.n_beta)
                problem = subspace_matrices(ci_exact, ham, basis)
                cutoff = config.qse.cutoff if config.qse.cutoff is not None else _EXACT_CUTOFF
                solution = solve_generalized(problem, cutoff)
                pt2_reference = refined_ci_vector(ci_exact, basis, solution)
                report["qse"] = {
                    "energy": float(solution.energies[0]),
                    "error_vs_fci": float(solution.energies[0]) - report["fci"]["energy"],
                    "retained_rank": solution.retained_rank,
                    "n_operators": len(basis),
                    "cutoff": cutoff,
                }

        purified_samples = []
        if config.tomography.shots > 0:
            stage = "sampling"
            with _timed(timings, stage):
                report["sampling"] = _sampling_stage(config, ham, ansatz, factorized, vqe,
                                                     purified_samples, jobs)

        if config.pt2.enabled:
            stage = "pt2"
            with _timed(timings, stage):
                report["pt2"] = _pt2_stage(config, ham, report, pt2_reference
                                           if pt2_reference is not None
                                           else forged_ci_vector(ansatz, vqe.thetas, vqe.lambdas,
                                                                 ham.n_alpha, ham.n_beta),
                                           purified_samples)

        report["formatted"] = _formatted_block(report)
        report["timings"] = timings
        return report
    except Exception as exc:
        raise StageFailure(stage, report, exc) from exc


def _sampling_stage(config, ham, ansatz, factorized, vqe, purified_samples, jobs=1) -> dict:
    shots = config.tomography.shots
    seeds = [config.tomography.base_seed + i for i in range(config.tomography.n_seeds)]
    n = ham.n_orbitals
    h_mat = sector_hamiltonian_matrix(ham)
    basis = build_excitations(n, ham.n_alpha, ham.n_beta) if config.qse.enabled else None

    def one_seed(seed: int):
        blochs = forged_tomography_sweep(ansatz, vqe.thetas, shots, seed)
        raw = raw_forged_energy(blochs, ansatz, factorized, vqe.lambdas) + ham.e_core
        ci, used_fallback = purified_ci_from_blochs(
            blochs, ansatz, vqe.lambdas, ham.n_alpha, ham.n_beta)
        vec = ci.amplitudes.reshape(-1)
        pur = float(np.vdot(vec, h_mat @ vec).real) + ham.e_core
        qse_raw_e = None
        qse_pur_e = None
        if basis is not None:
            noise_cutoff = config.qse.cutoff
            if noise_cutoff is None:
                errors = np.concatenate([b.errors[1:] for b in blochs.values()])
                errors = errors[errors > 0]
                noise_cutoff = 10.0 * float(np.median(errors)) if errors.size else _EXACT_CUTOFF
            if 2 * n <= _DENSITY_QUBIT_CAP:
                rho = assemble_forged_density(blochs, ansatz, vqe.lambdas)
                problem = subspace_matrices(rho, ham, basis,
                                            project_first=config.qse.project_first)
                qse_raw_e = float(solve_generalized(problem, noise_cutoff).energies[0])
            problem = subspace_matrices(ci, ham, basis)
            qse_pur_e = float(solve_generalized(problem, noise_cutoff).energies[0])
        return raw, pur, ci, used_fallback, qse_raw_e, qse_pur_e

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one_seed, seeds))
    else:
        results = [one_seed(seed) for seed in seeds]

    raw_energies = [r[0] for r in results]
    purified_energies = [r[1] for r in results]
    purified_samples.extend(r[2] for r in results)
    fallbacks = sum(int(r[3]) for r in results)
    qse_raw = [r[4] for r in results if r[4] is not None]
    qse_purified = [r[5] for r in results if r[5] is not None]

    block = {
        "shots": shots,
        "seeds": seeds,
        "raw_energy": _ensemble(raw_energies),
        "purified_energy": _ensemble(purified_energies),
        "n_fallbacks": fallbacks,
    }
    if qse_purified:
        block["qse_purified_energy"] = _ensemble(qse_purified)
    if qse_raw:
        block["qse_raw_energy"] = _ensemble(qse_raw)
    return block


def _pt2_stage(config, ham, report, reference, purified_samples) -> dict:
    full = config.full_ham
    window = config.pt2.window
    partition = build_dyall(full, window, reference)
    embedded = embed_in_full(reference, full.n_orbitals, window).normalized()
    vec = embedded.amplitudes.reshape(-1)
    e0 = float(np.vdot(vec, partition.full_matrix @ vec).real) + full.e_core
    exact = pt2_correction(partition, embedded, e0, config.pt2.degeneracy_threshold)
    base = report.get("qse", report["vqe"])["energy"]
    block = {
        "window": list(window),
        "delta_e": exact.delta_e,
        "n_terms": exact.n_terms,
        "e_total": base + exact.delta_e,
    }
    if purified_samples:
        sampled = pt2_with_sampling(
            partition, purified_samples, config.pt2.degeneracy_threshold)
        block["sampled"] = {
            "delta_e": sampled.delta_e,
            "stderr": sampled.stderr,
            "n_samples": int(sampled.samples.size),
            "samples": sampled.samples.tolist(),
        }
    return block


def _formatted_block(report: dict) -> dict:
    """Headline energies in kcal/mol relative to the FCI oracle."""
    fci = report["fci"]["energy"]
    block = {}
    for key, path in (
        ("vqe_error_kcal", ("vqe", "energy")),
        ("qse_error_kcal", ("qse", "energy")),
    ):
        section = report.get(path[0])
        if section is not None:
            block[key] = (section[path[1]] - fci) * HARTREE_TO_KCAL
    return block


def report_json(report: dict, include_timings: bool = True) -> str:
    """Canonical JSON for a report; timings are droppable for comparisons."""
    payload = report if include_timings else strip_timings(report)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def strip_timings(report: dict) -> dict:
    return {key: value for key, value in report.items() if key != "timings"}


def barrier_block(ts_report: dict, reactant_reports: list[dict]) -> dict:
    """Activation barrier: E(transition state) - sum of reactant energies.

    Computed at every level of theory present in all the reports, in
    hartree and kcal/mol.
    """
    levels = {
        "ef": ("vqe", "energy"),
        "ef_qse": ("qse", "energy"),
        "ef_qse_pt2": ("pt2", "e_total"),
    }
    block = {}
    for level, (section, key) in levels.items():
        reports = [ts_report] + reactant_reports
        if any(section not in rep or key not in rep[section] for rep in reports):
            continue
        barrier = ts_report[section][key] - sum(
            rep[section][key] for rep in reactant_reports)
        block[level] = {
            "hartree": barrier,
            "kcal_per_mol": barrier * HARTREE_TO_KCAL,
        }
    return block


def write_outputs(config: RunConfig, report: dict, directory: Path | None = None) -> list[Path]:
    """Write report.json plus the VQE trace CSV; returns written paths."""
    target = directory or config.output_dir
    if target is None:
        return []
    target = Path(target)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    report_path = target / "report.json"
    report_path.write_text(report_json(report))
    written.append(report_path)
    trace = report.get("vqe", {}).get("trace")
    if trace:
        lines = ["evaluation,energy"]
        lines.extend(f"{step},{energy:.12f}" for step, energy in trace)
        trace_path = target / "vqe_trace.csv"
        trace_path.write_text("\n".join(lines) + "\n")
        written.append(trace_path)
    return written
