"""Command-line entry points.

Exit codes: 0 success, 2 configuration or validation problem, 3
numerical failure.  Every subcommand prints JSON (or CSV for sweep) to
stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import shot_sweep
from .circuits import brick_wall_layout, count_resources
from .config import config_from_dict, load_config, override_config
from .errors import NumericalError, StageFailure, ValidationError
from .forging import ForgedAnsatz, select_bitstrings, vqe_minimize
from .hamiltonian import parse_fcidump
from .operators import spin_factorize
from .oracle import fci_ground_state
from .pipeline import barrier_block, report_json, run_pipeline, write_outputs
from .qse import StateSource, ef_qse_energy


def _print_json(payload) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _load_ham(path: str):
    file = Path(path)
    if not file.is_file():
        raise ValidationError(f"integral file not found: {file}")
    return parse_fcidump(file)


def _optimize(args):
    ham = _load_ham(args.fcidump)
    layout = brick_wall_layout(ham.n_orbitals, args.hops)
    bitstrings, lambdas0 = select_bitstrings(ham, args.bitstrings)
    ansatz = ForgedAnsatz(layout, bitstrings)
    factorized = spin_factorize(ham)
    result = vqe_minimize(
        ansatz, factorized, lambdas0=lambdas0,
        seed=args.seed, restarts=args.restarts)
    return ham, ansatz, factorized, result


def _cmd_run(args) -> int:
    config = override_config(
        load_config(args.config),
        shots=args.shots,
        seeds=args.seeds,
        base_seed=args.base_seed,
        exact=args.exact,
        qse_cutoff=args.qse_cutoff,
        project_first=False if args.project_last else None,
        label=args.label,
        output_dir=args.output,
    )
    report = run_pipeline(config, jobs=args.jobs)
    write_outputs(config, report)
    if args.reactants:
        reactant_reports = []
        for path in args.reactants:
            reactant_config = load_config(path)
            reactant_report = run_pipeline(reactant_config, jobs=args.jobs)
            write_outputs(reactant_config, reactant_report)
            reactant_reports.append(reactant_report)
        _print_json({
            "transition_state": report,
            "reactants": reactant_reports,
            "barrier": barrier_block(report, reactant_reports),
        })
        return 0
    print(report_json(report), end="")
    return 0


def _cmd_vqe(args) -> int:
    ham, ansatz, _, result = _optimize(args)
    fci_energies, _ = fci_ground_state(ham)
    _print_json({
        "energy": result.energy,
        "fci_energy": float(fci_energies[0]),
        "error_vs_fci": result.energy - float(fci_energies[0]),
        "converged": result.converged,
        "n_evaluations": result.n_evaluations,
        "bitstrings": [list(b) for b in ansatz.bitstrings],
        "thetas": result.thetas.tolist(),
        "lambdas": result.lambdas.tolist(),
    })
    return 0


def _cmd_qse(args) -> int:
    ham, ansatz, _, result = _optimize(args)
    if args.source == "exact":
        source = StateSource.exact()
    elif args.source == "shots":
        source = StateSource.sampled(args.shots, args.tomography_seed)
    else:
        source = StateSource.purified(args.shots, args.tomography_seed)
    if source.kind != "exact" and args.shots <= 0:
        raise ValidationError("sampled sources need --shots > 0")
    outcome = ef_qse_energy(
        ansatz, ham, result.thetas, result.lambdas,
        source=source,
        overlap_cutoff=args.qse_cutoff,
        project_first=not args.project_last,
    )
    fci_energies, _ = fci_ground_state(ham)
    _print_json({
        "energy": outcome.energy,
        "ef_energy": result.energy,
        "fci_energy": float(fci_energies[0]),
        "error_vs_fci": outcome.energy - float(fci_energies[0]),
        "retained_rank": outcome.solution.retained_rank,
        "overlap_cutoff": outcome.overlap_cutoff,
        "source": args.source,
        "used_fallback": outcome.used_fallback,
    })
    return 0


def _cmd_pt2(args) -> int:
    data = {
        "label": "pt2",
        "files": {"fcidump": args.fcidump, "full_fcidump": args.full_fcidump},
        "ansatz": {"bitstrings": args.bitstrings, "seed": args.seed,
                   "restarts": args.restarts},
        "pt2": {"enabled": True, "window": [args.window[0], args.window[1]],
                "threshold": args.threshold},
    }
    if args.hops is not None:
        data["ansatz"]["hops"] = args.hops
    config = config_from_dict(data, Path.cwd())
    report = run_pipeline(config)
    _print_json({
        "pt2": report["pt2"],
        "qse_energy": report.get("qse", {}).get("energy"),
        "vqe_energy": report["vqe"]["energy"],
        "fci_energy": report["fci"]["energy"],
    })
    return 0


def _cmd_sweep(args) -> int:
    grid = [int(part) for part in args.shot_grid.split(",") if part.strip()]
    _, ansatz, _, result = _optimize(args)
    prep_labels = None
    if args.preps:
        prep_labels = [part.strip() for part in args.preps.split(",") if part.strip()]
    sweep = shot_sweep(
        ansatz, result.thetas, grid,
        seeds=range(args.base_seed, args.base_seed + args.seeds),
        prep_labels=prep_labels,
        jobs=args.jobs,
    )
    if args.output:
        Path(args.output).write_text(sweep.to_csv())
        _print_json({
            "csv": str(args.output),
            "plateau_shots": sweep.plateau_shots,
            "n_rows": len(sweep.rows),
        })
    else:
        print(sweep.to_csv(), end="")
        print(json.dumps({"plateau_shots": sweep.plateau_shots}), file=sys.stderr)
    return 0


def _cmd_resources(args) -> int:
    rows = []
    for n_qubits in (int(part) for part in args.qubits.split(",") if part.strip()):
        layout = brick_wall_layout(n_qubits, args.hops)
        counted = count_resources(layout, args.bitstrings)
        rows.append({
            "qubits": n_qubits,
            "hops": layout.n_hops,
            "parameters": layout.n_hops + args.bitstrings,
            "single_qubit_gates": counted.single_qubit,
            "two_qubit_gates": counted.two_qubit,
            "n_preparations": counted.n_preparations,
            "n_circuits": counted.n_circuits,
        })
    _print_json({"bitstrings": args.bitstrings, "rows": rows})
    return 0


def _cmd_oracle(args) -> int:
    ham = _load_ham(args.fcidump)
    energies, states = fci_ground_state(ham, n_states=args.states)
    dominant = states[0].dominant_determinant()
    _print_json({
        "energies": np.asarray(energies).tolist(),
        "n_orbitals": ham.n_orbitals,
        "n_alpha": ham.n_alpha,
        "n_beta": ham.n_beta,
        "dominant_determinant": [
            format(dominant[0], f"0{ham.n_orbitals}b")[::-1],
            format(dominant[1], f"0{ham.n_orbitals}b")[::-1],
        ],
    })
    return 0


def _add_ansatz_flags(parser) -> None:
    parser.add_argument("--fcidump", required=True, help="active-space integral file")
    parser.add_argument("--bitstrings", type=int, default=2,
                        help="Schmidt rank K (default 2)")
    parser.add_argument("--hops", type=int, default=None,
                        help="hop gates in the ansatz (default: width-based)")
    parser.add_argument("--seed", type=int, default=0, help="optimizer seed")
    parser.add_argument("--restarts", type=int, default=2, help="optimizer restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forgechem",
        description="Forged-ansatz quantum chemistry simulation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="full pipeline from a TOML config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--reactants", nargs="+", default=None,
                       help="reactant configs; computes the activation barrier")
    p_run.add_argument("--shots", type=int, default=None)
    p_run.add_argument("--seeds", type=int, default=None)
    p_run.add_argument("--base-seed", type=int, default=None)
    p_run.add_argument("--exact", action="store_true", help="force shots = 0")
    p_run.add_argument("--qse-cutoff", type=float, default=None)
    p_run.add_argument("--project-last", action="store_true",
                       help="sector-project the sampled density after matrix assembly")
    p_run.add_argument("--label", default=None)
    p_run.add_argument("--output", default=None, help="report directory")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.set_defaults(handler=_cmd_run)

    p_vqe = sub.add_parser("vqe", help="optimize the forged ansatz")
    _add_ansatz_flags(p_vqe)
    p_vqe.set_defaults(handler=_cmd_vqe)

    p_qse = sub.add_parser("qse", help="subspace expansion on the optimized ansatz")
    _add_ansatz_flags(p_qse)
    p_qse.add_argument("--source", choices=("exact", "shots", "purified"),
                       default="exact")
    p_qse.add_argument("--shots", type=int, default=0)
    p_qse.add_argument("--tomography-seed", type=int, default=0)
    p_qse.add_argument("--qse-cutoff", type=float, default=None)
    p_qse.add_argument("--project-last", action="store_true")
    p_qse.set_defaults(handler=_cmd_qse)

    p_pt2 = sub.add_parser("pt2", help="second-order correction from full-space integrals")
    _add_ansatz_flags(p_pt2)
    p_pt2.add_argument("--full-fcidump", required=True)
    p_pt2.add_argument("--window", type=int, nargs=2, required=True,
                       metavar=("START", "STOP"))
    p_pt2.add_argument("--threshold", type=float, default=1e-8)
    p_pt2.set_defaults(handler=_cmd_pt2)

    p_sweep = sub.add_parser("sweep", help="shot sweep with weighted correlations")
    _add_ansatz_flags(p_sweep)
    p_sweep.add_argument("--shot-grid", default="100,250,500,1000,2500,5000,10000")
    p_sweep.add_argument("--seeds", type=int, default=5, help="seeds per grid point")
    p_sweep.add_argument("--base-seed", type=int, default=0)
    p_sweep.add_argument("--preps", default=None,
                         help="comma-separated preparation labels (default: all)")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--output", default=None, help="CSV path")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_res = sub.add_parser("resources", help="gate and circuit accounting")
    p_res.add_argument("--qubits", default="2,4,6,8")
    p_res.add_argument("--bitstrings", type=int, default=2)
    p_res.add_argument("--hops", type=int, default=None)
    p_res.set_defaults(handler=_cmd_resources)

    p_oracle = sub.add_parser("oracle", help="exact diagonalization reference")
    p_oracle.add_argument("--fcidump", required=True)
    p_oracle.add_argument("--states", type=int, default=1)
    p_oracle.set_defaults(handler=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.__cause__, ValidationError) else 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
