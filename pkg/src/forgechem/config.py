"""Run configuration: TOML parsing, validation, and flag overrides.

Configs are validated fail-fast: every referenced integral file must
exist and parse before any stage launches, and unknown keys are
rejected so a typo cannot silently disable a stage.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .errors import ValidationError
from .hamiltonian import ActiveSpaceHamiltonian, parse_fcidump, reduce_to_window

_QSE_SOURCES = ("exact", "shots", "purified")


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ValidationError(f"unknown keys in {where}: {sorted(unknown)}")


@dataclass(frozen=True)
class AnsatzConfig:
    n_bitstrings: int = 2
    n_hops: int | None = None
    seed: int = 0
    restarts: int = 2
    max_evaluations: int = 20000

    def validate(self) -> None:
        if self.n_bitstrings < 1:
            raise ValidationError("need at least one bitstring")
        if self.n_hops is not None and self.n_hops < 0:
            raise ValidationError("hop count cannot be negative")
        if self.restarts < 0 or self.max_evaluations < 1:
            raise ValidationError("optimizer budget out of range")


@dataclass(frozen=True)
class TomographyConfig:
    shots: int = 0
    n_seeds: int = 1
    base_seed: int = 0

    def validate(self) -> None:
        if self.shots < 0:
            raise ValidationError("shots cannot be negative; 0 means exact")
        if self.n_seeds < 1:
            raise ValidationError("need at least one tomography seed")


@dataclass(frozen=True)
class QSEConfig:
    enabled: bool = True
    cutoff: float | None = None
    project_first: bool = True

    def validate(self) -> None:
        if self.cutoff is not None and self.cutoff <= 0:
            raise ValidationError("overlap cutoff must be positive")


@dataclass(frozen=True)
class PT2Config:
    enabled: bool = False
    window: tuple[int, int] | None = None
    degeneracy_threshold: float = 1e-8

    def validate(self) -> None:
        if self.enabled:
            if self.window is None:
                raise ValidationError("perturbation stage needs an active window")
            start, stop = self.window
            if start < 0 or stop <= start:
                raise ValidationError("active window must be a non-empty (start, stop)")
        if self.degeneracy_threshold <= 0:
            raise ValidationError("degeneracy threshold must be positive")


@dataclass(frozen=True)
class RunConfig:
    """Everything one pipeline run consumes, with integrals pre-parsed."""

    fcidump_path: Path
    active_ham: ActiveSpaceHamiltonian = field(repr=False)
    label: str = "run"
    full_fcidump_path: Path | None = None
    full_ham: ActiveSpaceHamiltonian | None = field(default=None, repr=False)
    ansatz: AnsatzConfig = field(default_factory=AnsatzConfig)
    tomography: TomographyConfig = field(default_factory=TomographyConfig)
    qse: QSEConfig = field(default_factory=QSEConfig)
    pt2: PT2Config = field(default_factory=PT2Config)
    output_dir: Path | None = None

    def validate(self) -> None:
        self.ansatz.validate()
        self.tomography.validate()
        self.qse.validate()
        self.pt2.validate()
        if self.pt2.enabled:
            if self.full_ham is None:
                raise ValidationError("perturbation stage needs full-space integrals")
            start, stop = self.pt2.window
            if stop > self.full_ham.n_orbitals:
                raise ValidationError("active window exceeds the full orbital count")
            if stop - start != self.active_ham.n_orbitals:
                raise ValidationError("active window size does not match the active integrals")
            derived = reduce_to_window(self.full_ham, self.pt2.window)
            consistent = (
                (derived.n_alpha, derived.n_beta) == (self.active_ham.n_alpha, self.active_ham.n_beta)
                and np.allclose(derived.h1, self.active_ham.h1, atol=1e-6)
                and np.allclose(derived.h2, self.active_ham.h2, atol=1e-6)
                and abs(derived.e_core - self.active_ham.e_core) < 1e-6
            )
            if not consistent:
                raise ValidationError(
                    "active integrals are not the stated window of the full integrals")

    def public_dict(self) -> dict:
        """Config echo for reports; paths as strings, integrals omitted."""
        return {
            "label": self.label,
            "fcidump": str(self.fcidump_path),
            "full_fcidump": str(self.full_fcidump_path) if self.full_fcidump_path else None,
            "ansatz": {
                "n_bitstrings": self.ansatz.n_bitstrings,
                "n_hops": self.ansatz.n_hops,
                "seed": self.ansatz.seed,
                "restarts": self.ansatz.restarts,
                "max_evaluations": self.ansatz.max_evaluations,
            },
            "tomography": {
                "shots": self.tomography.shots,
                "n_seeds": self.tomography.n_seeds,
                "base_seed": self.tomography.base_seed,
            },
            "qse": {
                "enabled": self.qse.enabled,
                "cutoff": self.qse.cutoff,
                "project_first": self.qse.project_first,
            },
            "pt2": {
                "enabled": self.pt2.enabled,
                "window": list(self.pt2.window) if self.pt2.window else None,
                "degeneracy_threshold": self.pt2.degeneracy_threshold,
            },
        }


def config_from_dict(data: dict, base_dir: Path, label: str | None = None) -> RunConfig:
    """Build and validate a RunConfig from parsed TOML data."""
    _check_keys(data, {"label", "files", "ansatz", "tomography", "qse", "pt2", "output"},
                "config")
    files = data.get("files", {})
    _check_keys(files, {"fcidump", "full_fcidump"}, "[files]")
    if "fcidump" not in files:
        raise ValidationError("config must name an fcidump file")
    fcidump_path = (base_dir / files["fcidump"]).resolve()
    if not fcidump_path.is_file():
        raise ValidationError(f"integral file not found: {fcidump_path}")
    active_ham = parse_fcidump(fcidump_path)

    full_path = None
    full_ham = None
    if "full_fcidump" in files:
        full_path = (base_dir / files["full_fcidump"]).resolve()
        if not full_path.is_file():
            raise ValidationError(f"integral file not found: {full_path}")
        full_ham = parse_fcidump(full_path)

    ansatz_data = data.get("ansatz", {})
    _check_keys(ansatz_data, {"bitstrings", "hops", "seed", "restarts", "max_evaluations"},
                "[ansatz]")
    ansatz = AnsatzConfig(
        n_bitstrings=int(ansatz_data.get("bitstrings", 2)),
        n_hops=int(ansatz_data["hops"]) if "hops" in ansatz_data else None,
        seed=int(ansatz_data.get("seed", 0)),
        restarts=int(ansatz_data.get("restarts", 2)),
        max_evaluations=int(ansatz_data.get("max_evaluations", 20000)),
    )

    tomo_data = data.get("tomography", {})
    _check_keys(tomo_data, {"shots", "seeds", "base_seed"}, "[tomography]")
    tomography = TomographyConfig(
        shots=int(tomo_data.get("shots", 0)),
        n_seeds=int(tomo_data.get("seeds", 1)),
        base_seed=int(tomo_data.get("base_seed", 0)),
    )

    qse_data = data.get("qse", {})
    _check_keys(qse_data, {"enabled", "cutoff", "project_first"}, "[qse]")
    qse = QSEConfig(
        enabled=bool(qse_data.get("enabled", True)),
        cutoff=float(qse_data["cutoff"]) if "cutoff" in qse_data else None,
        project_first=bool(qse_data.get("project_first", True)),
    )

    pt2_data = data.get("pt2", {})
    _check_keys(pt2_data, {"enabled", "window", "threshold"}, "[pt2]")
    window = None
    if "window" in pt2_data:
        raw = pt2_data["window"]
        if not isinstance(raw, list) or len(raw) != 2:
            raise ValidationError("pt2 window must be a [start, stop] pair")
        window = (int(raw[0]), int(raw[1]))
    pt2 = PT2Config(
        enabled=bool(pt2_data.get("enabled", False)),
        window=window,
        degeneracy_threshold=float(pt2_data.get("threshold", 1e-8)),
    )

    output_data = data.get("output", {})
    _check_keys(output_data, {"directory"}, "[output]")
    output_dir = (base_dir / output_data["directory"]).resolve() if "directory" in output_data else None

    config = RunConfig(
        fcidump_path=fcidump_path,
        active_ham=active_ham,
        label=str(label or data.get("label", "run")),
        full_fcidump_path=full_path,
        full_ham=full_ham,
        ansatz=ansatz,
        tomography=tomography,
        qse=qse,
        pt2=pt2,
        output_dir=output_dir,
    )
    config.validate()
    return config


def load_config(path) -> RunConfig:
    """Parse a TOML run config; relative paths resolve against the file."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config does not parse: {exc}") from exc
    return config_from_dict(data, path.parent)


def override_config(config: RunConfig, **overrides) -> RunConfig:
    """Apply CLI flag overrides onto a loaded config.

    Supported keys: shots, seeds, base_seed, exact, qse_cutoff,
    project_first, label, output_dir.
    """
    tomography = config.tomography
    if overrides.get("exact"):
        tomography = replace(tomography, shots=0)
    if overrides.get("shots") is not None:
        tomography = replace(tomography, shots=int(overrides["shots"]))
    if overrides.get("seeds") is not None:
        tomography = replace(tomography, n_seeds=int(overrides["seeds"]))
    if overrides.get("base_seed") is not None:
        tomography = replace(tomography, base_seed=int(overrides["base_seed"]))
    qse = config.qse
    if overrides.get("qse_cutoff") is not None:
        qse = replace(qse, cutoff=float(overrides["qse_cutoff"]))
    if overrides.get("project_first") is not None:
        qse = replace(qse, project_first=bool(overrides["project_first"]))
    updated = replace(
        config,
        tomography=tomography,
        qse=qse,
        label=str(overrides["label"]) if overrides.get("label") else config.label,
        output_dir=Path(overrides["output_dir"]) if overrides.get("output_dir") else config.output_dir,
    )
    updated.validate()
    return updated
