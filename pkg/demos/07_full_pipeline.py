"""End-to-end pipeline run from a TOML config, plus barrier arithmetic.

The run config wires every stage together: exact diagonalization for
reference, forged VQE, subspace expansion, sampled tomography, and the
second-order window correction.  The same report dictionaries combine
into activation barriers at each level of theory, here for the toy
reaction chain4 -> 2 x h2.
"""

import json
from pathlib import Path

from forgechem.config import load_config, override_config
from forgechem.pipeline import barrier_block, run_pipeline

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def main():
    config = load_config(FIXTURES / "layered4_pt2.toml")
    report = run_pipeline(config, jobs=2)

    print(f"pipeline run '{report['label']}', stages: "
          f"{sorted(report['timings'])}")
    print(f"  FCI floor          {report['fci']['energy']:+.10f}")
    print(f"  EF optimum         {report['vqe']['energy']:+.10f}  "
          f"({report['formatted']['vqe_error_kcal']:+.3f} kcal/mol)")
    print(f"  EF+QSE             {report['qse']['energy']:+.10f}  "
          f"({report['formatted']['qse_error_kcal']:+.3f} kcal/mol)")
    sampling = report["sampling"]
    print(f"  {sampling['shots']} shots x {len(sampling['seeds'])} seeds: "
          f"raw std {sampling['raw_energy']['std']:.2e}, "
          f"purified std {sampling['purified_energy']['std']:.2e}")
    pt2 = report["pt2"]
    print(f"  PT2 window {tuple(pt2['window'])}: delta {pt2['delta_e']:+.8f}, "
          f"E(EF+QSE+PT2) = {pt2['e_total']:+.10f}")
    print(f"  sampled delta      {pt2['sampled']['delta_e']:+.8f} "
          f"+/- {pt2['sampled']['stderr']:.1e} "
          f"({pt2['sampled']['n_samples']} samples)")
    print(f"  resources: {report['resources']['two_qubit_gates']} two-qubit "
          f"gates, {report['resources']['n_circuits']} circuits")

    print("\nbarrier for chain4 -> 2 x h2 (exact, shot-free):")
    ts_report = run_pipeline(override_config(
        load_config(FIXTURES / "chain4_sampled.toml"), exact=True))
    h2_report = run_pipeline(load_config(FIXTURES / "h2_run.toml"))
    barriers = barrier_block(ts_report, [h2_report, h2_report])
    print(json.dumps(barriers, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
