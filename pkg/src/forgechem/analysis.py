"""Error-weighted correlation statistics and shot-sweep harness.

Finite-shot Bloch vectors are scored against the exact expectation list
with a Pearson coefficient whose X-side terms carry weights w_i = 1 -
eps_i^2 from the per-string sampling errors.  The weights deflate noisy
strings in the X mean, the cross products, and the X variance, but the
Y variance stays unweighted; since every weight is at most one, the
Cauchy-Schwarz bound |r| <= 1 survives the asymmetry.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedCorrelationError, ValidationError
from .forging import ForgedAnsatz
from .tomography import sample_tomography

_DENOMINATOR_FLOOR = 1e-14
PLATEAU_THRESHOLD = 0.005


@dataclass(frozen=True)
class WeightedSeries:
    """Estimates x with per-point errors, against ground truth y."""

    x: np.ndarray
    x_err: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "x_err", np.asarray(self.x_err, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if not (self.x.shape == self.x_err.shape == self.y.shape) or self.x.ndim != 1:
            raise ValidationError("series must be equal-length vectors")
        if self.x.size < 2:
            raise ValidationError("need at least two points")
        if np.any(self.x_err < 0) or np.any(self.x_err > 1):
            raise ValidationError("errors must lie in [0, 1] so weights stay non-negative")

    def weights(self) -> np.ndarray:
        return 1.0 - self.x_err ** 2


def weighted_pearson(series: WeightedSeries, symmetric: bool = False) -> float:
    """Correlation with error weights on the estimate side only.

    The symmetric flag also weights the ground-truth mean and variance,
    the conventional form, kept for comparison.
    """
    w = series.weights()
    total = w.sum()
    if total <= _DENOMINATOR_FLOOR:
        raise UndefinedCorrelationError("all weights vanish")
    x_mean = float(w @ series.x) / total
    dx = series.x - x_mean
    if symmetric:
        y_mean = float(w @ series.y) / total
        dy = series.y - y_mean
        var_y = float(w @ dy ** 2)
    else:
        y_mean = float(series.y.mean())
        dy = series.y - y_mean
        var_y = float(dy @ dy)
    var_x = float(w @ dx ** 2)
    if var_x <= _DENOMINATOR_FLOOR or var_y <= _DENOMINATOR_FLOOR:
        raise UndefinedCorrelationError("a deflated series has no variance")
    return float(w @ (dx * dy)) / np.sqrt(var_x * var_y)


@dataclass(frozen=True)
class SweepRow:
    prep_label: str
    shots: int
    seed: int
    r_weighted: float


@dataclass(frozen=True)
class ShotSweepResult:
    """Per-row correlations plus the detected plateau per preparation.

    plateau_shots maps each label to the smallest grid value whose mean
    r sits within the plateau threshold of the grid maximum, or None
    when only the last grid point qualifies (still improving at the
    edge of the grid).
    """

    rows: tuple[SweepRow, ...]
    plateau_shots: dict[str, int | None]

    def mean_r(self, prep_label: str) -> tuple[np.ndarray, np.ndarray]:
        """(shots grid, mean r over seeds) for one preparation."""
        grid = sorted({row.shots for row in self.rows if row.prep_label == prep_label})
        means = [
            float(np.mean([
                row.r_weighted
                for row in self.rows
                if row.prep_label == prep_label and row.shots == shots
            ]))
            for shots in grid
        ]
        return np.array(grid), np.array(means)

    def to_csv(self) -> str:
        lines = ["prep_label,shots,seed,r_weighted"]
        lines.extend(
            f"{row.prep_label},{row.shots},{row.seed},{row.r_weighted:.12f}"
            for row in self.rows
        )
        return "\n".join(lines) + "\n"


def detect_plateau(
    shot_grid,
    mean_r,
    threshold: float = PLATEAU_THRESHOLD,
) -> int | None:
    """Smallest shots count whose mean r reaches the grid plateau.

    None means diminishing returns were not reached: only the final
    grid point is within the threshold of the maximum.
    """
    grid = np.asarray(shot_grid)
    means = np.asarray(mean_r, dtype=float)
    if grid.size != means.size or grid.size < 3:
        raise ValidationError("need at least three aligned grid points")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("shot grid must be strictly ascending")
    qualifying = np.flatnonzero(means >= means.max() - threshold)
    first = int(qualifying[0])
    if first == grid.size - 1:
        return None
    return int(grid[first])


def shot_sweep(
    ansatz: ForgedAnsatz,
    thetas,
    shot_grid,
    seeds,
    prep_labels=None,
    jobs: int = 1,
) -> ShotSweepResult:
    """Correlate sampled Bloch vectors against exact ones over a shot grid.

    Each (preparation, shots, seed) triple is sampled independently and
    scored over all Pauli strings.  Rows come back sorted, so the result
    is independent of worker scheduling.
    """
    grid = [int(s) for s in shot_grid]
    if grid != sorted(grid) or len(set(grid)) != len(grid) or min(grid, default=0) < 0:
        raise ValidationError("shot grid must be ascending without repeats; 0 means exact")
    circuit = ansatz.layout.circuit(thetas)
    preparations = ansatz.preparations()
    if prep_labels is not None:
        wanted = set(prep_labels)
        unknown = wanted - {label for label, _ in preparations}
        if unknown:
            raise ValidationError(f"unknown preparations: {sorted(unknown)}")
        preparations = [(label, s) for label, s in preparations if label in wanted]

    exact = {}
    for label, prep in preparations:
        bloch = sample_tomography(prep, circuit, 0, 0)
        exact[label] = bloch.values

    tasks = [
        (index, label, prep, shots, int(seed))
        for index, (label, prep) in enumerate(preparations)
        for shots in grid
        for seed in seeds
    ]

    def run(task) -> SweepRow:
        index, label, prep, shots, seed = task
        bloch = sample_tomography(prep, circuit, shots, (seed, index))
        series = WeightedSeries(bloch.values, bloch.errors, exact[label])
        return SweepRow(label, shots, seed, weighted_pearson(series))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run, tasks))
    else:
        rows = [run(task) for task in tasks]
    rows.sort(key=lambda row: (row.prep_label, row.shots, row.seed))

    plateaus: dict[str, int | None] = {}
    for label, _ in preparations:
        means = [
            float(np.mean([r.r_weighted for r in rows if r.prep_label == label and r.shots == s]))
            for s in grid
        ]
        plateaus[label] = detect_plateau(grid, means) if len(grid) >= 3 else None
    return ShotSweepResult(tuple(rows), plateaus)
