"""Classical simulation of entanglement-forged quantum chemistry.

The package covers the full workflow: parse an active-space
Hamiltonian, optimize a forged ansatz over Schmidt-paired spin
registers, reconstruct the state by Pauli tomography under shot noise,
purify the sampled density back to a particle-number sector, refine by
subspace expansion, and append a multireference second-order correction
from the surrounding orbital window.  Everything is verified against an
exact-diagonalization oracle.
"""

from .analysis import (
    ShotSweepResult,
    SweepRow,
    WeightedSeries,
    detect_plateau,
    shot_sweep,
    weighted_pearson,
)
from .circuits import (
    AnsatzLayout,
    Circuit,
    ResourceCount,
    apply_circuit,
    brick_wall_layout,
    count_resources,
    prepare_bitstring,
    prepare_superposition,
)
from .config import RunConfig, config_from_dict, load_config, override_config
from .determinants import CIVector, one_particle_rdm, sector_hamiltonian_matrix
from .errors import (
    CapacityError,
    IntruderStateError,
    NumericalError,
    SingularOverlapError,
    StageFailure,
    UndefinedCorrelationError,
    ValidationError,
)
from .forging import (
    ForgedAnsatz,
    VQEResult,
    forged_ci_vector,
    forged_energy,
    forged_statevector,
    select_bitstrings,
    vqe_minimize,
)
from .hamiltonian import (
    ActiveSpaceHamiltonian,
    parse_fcidump,
    reduce_to_window,
    write_fcidump,
)
from .operators import spin_factorize
from .oracle import FCIOracle, fci_ground_state
from .pauli import PauliSum
from .pipeline import (
    HARTREE_TO_KCAL,
    barrier_block,
    report_json,
    run_pipeline,
    strip_timings,
    write_outputs,
)
from .pt2 import (
    DyallPartition,
    PT2Result,
    build_dyall,
    embed_in_full,
    pt2_correction,
    pt2_with_sampling,
)
from .purify import (
    PurifiedEnsemble,
    assemble_forged_density,
    project_sector,
    purified_ci_from_blochs,
    purified_energy_samples,
    raw_forged_energy,
    sector_trace_energy,
)
from .qse import (
    ExcitationBasis,
    QSEOutcome,
    StateSource,
    SubspaceProblem,
    SubspaceSolution,
    build_excitations,
    ef_qse_energy,
    refined_ci_vector,
    solve_generalized,
    subspace_matrices,
)
from .tomography import (
    BlochVector,
    DensityMatrix,
    exact_bloch,
    forged_tomography_sweep,
    reconstruct_density,
    sample_tomography,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveSpaceHamiltonian",
    "AnsatzLayout",
    "BlochVector",
    "CIVector",
    "CapacityError",
    "Circuit",
    "DensityMatrix",
    "DyallPartition",
    "ExcitationBasis",
    "FCIOracle",
    "ForgedAnsatz",
    "HARTREE_TO_KCAL",
    "IntruderStateError",
    "NumericalError",
    "PT2Result",
    "PauliSum",
    "PurifiedEnsemble",
    "QSEOutcome",
    "ResourceCount",
    "RunConfig",
    "ShotSweepResult",
    "SingularOverlapError",
    "StageFailure",
    "StateSource",
    "SubspaceProblem",
    "SubspaceSolution",
    "SweepRow",
    "UndefinedCorrelationError",
    "VQEResult",
    "ValidationError",
    "WeightedSeries",
    "apply_circuit",
    "assemble_forged_density",
    "barrier_block",
    "brick_wall_layout",
    "build_dyall",
    "build_excitations",
    "config_from_dict",
    "count_resources",
    "detect_plateau",
    "ef_qse_energy",
    "embed_in_full",
    "exact_bloch",
    "fci_ground_state",
    "forged_ci_vector",
    "forged_energy",
    "forged_statevector",
    "forged_tomography_sweep",
    "load_config",
    "one_particle_rdm",
    "override_config",
    "parse_fcidump",
    "prepare_bitstring",
    "prepare_superposition",
    "project_sector",
    "pt2_correction",
    "pt2_with_sampling",
    "purified_ci_from_blochs",
    "purified_energy_samples",
    "raw_forged_energy",
    "sector_trace_energy",
    "reconstruct_density",
    "reduce_to_window",
    "refined_ci_vector",
    "report_json",
    "run_pipeline",
    "sample_tomography",
    "sector_hamiltonian_matrix",
    "select_bitstrings",
    "shot_sweep",
    "solve_generalized",
    "spin_factorize",
    "strip_timings",
    "subspace_matrices",
    "vqe_minimize",
    "weighted_pearson",
    "write_fcidump",
    "write_outputs",
]
