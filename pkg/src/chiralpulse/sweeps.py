"""Parameter sweeps writing reproducible CSV data files.

Four sweep families cover the standard outputs of the design workflow:
population traces over time, fidelity against a single error axis, the 2-D
(alpha, delta) fidelity map, and sensitivity against the ansatz weight n.

Every output is deterministic: no timestamps, fixed float formatting (15
significant digits), and worker-count-independent results (points are
independent work items merged by index).  CSV files start with a commented
metadata block (`# key = value`) sufficient to reproduce the run.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._version import __version__
from .dynamics import Handedness, basis_state, make_grid, _propagate_states
from .invariants import InvariantSchedule, ansatz_schedule, default_clamp
from .quadrature import DEFAULT_ABS_TOL
from .robustness import (
    ErrorModel,
    _perturbed_stack,
    perturbative_fidelity,
    q_alpha,
    q_delta,
)

FLOAT_FORMAT = "%.15g"


@dataclass(frozen=True)
class ErrorAxis:
    """One swept error amplitude: kind, closed range, and point count."""

    kind: str
    minimum: float
    maximum: float
    points: int

    def __post_init__(self):
        if self.kind not in ("systematic", "detuning"):
            raise ValueError(f"axis kind must be systematic or detuning, got {self.kind!r}")
        if self.points < 2:
            raise ValueError(f"axis needs at least 2 points, got {self.points}")
        if not self.minimum < self.maximum:
            raise ValueError("axis minimum must be below maximum")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.points)

    @property
    def column(self) -> str:
        return "alpha" if self.kind == "systematic" else "delta"


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: schemes, error axes, evaluation mode, and solver settings."""

    schemes: tuple          # of (label, InvariantSchedule)
    axis1: ErrorAxis
    axis2: Optional[ErrorAxis] = None
    mode: str = "exact"     # exact | perturbative | both
    handedness: str = "both"  # left | right | both
    steps: int = 4000
    clamp: Optional[float] = None
    abs_tol: float = DEFAULT_ABS_TOL
    workers: int = 1

    def __post_init__(self):
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if self.mode not in ("exact", "perturbative", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.handedness not in ("left", "right", "both"):
            raise ValueError(f"unknown handedness {self.handedness!r}")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def handedness_list(self) -> tuple[Handedness, ...]:
        if self.handedness == "left":
            return (Handedness.LEFT,)
        if self.handedness == "right":
            return (Handedness.RIGHT,)
        return (Handedness.LEFT, Handedness.RIGHT)


@dataclass(frozen=True)
class SweepResult:
    """Column-oriented sweep output plus reproduction metadata."""

    columns: tuple
    data: np.ndarray
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def to_csv(self, path) -> None:
        lines = [f"# {key} = {value}" for key, value in self.metadata.items()]
        lines.append(",".join(self.columns))
        for row in self.data:
            lines.append(",".join(FLOAT_FORMAT % v for v in row))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _base_metadata(spec_like: dict) -> dict:
    meta = {"code_version": __version__}
    meta.update(spec_like)
    return meta


def _scheme_meta(label: str, schedule: InvariantSchedule) -> str:
    desc = schedule.describe()
    return f"{label}:" + ",".join(f"{k}={v}" for k, v in desc.items())


def _final_fidelity(schedule: InvariantSchedule, handedness: Handedness,
                    mids: np.ndarray, dts: np.ndarray, clamp: float,
                    alpha: float, delta: float,
                    base_stack: np.ndarray | None = None) -> float:
    if base_stack is None:
        stack = _perturbed_stack(schedule, handedness, mids, clamp, alpha, delta)
    else:
        stack = base_stack * (1.0 + alpha)
        stack[:, 0, 0] -= delta
        stack[:, 2, 2] += delta
    states = _propagate_states(stack, dts, basis_state(2))
    return float(np.abs(states[-1, handedness.target_level - 1]) ** 2)


def _map_indexed(worker, count: int, workers: int) -> list:
    if workers <= 1:
        return [worker(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, range(count)))


# ---------------------------------------------------------------------------
# sweep operations
# ---------------------------------------------------------------------------

def population_trace(schedule: InvariantSchedule, handedness: Handedness,
                     steps: int = 4000, clamp: float | None = None,
                     points: int = 201) -> SweepResult:
    """Level populations against t/T from the initial state |2>."""
    if points < 2:
        raise ValueError("points must be >= 2")
    T = schedule.duration
    if clamp is None:
        clamp = default_clamp(T)
    grid = make_grid(T, steps)
    mids = 0.5 * (grid[:-1] + grid[1:])
    stack = _perturbed_stack(schedule, handedness, mids, clamp, 0.0, 0.0)
    states = _propagate_states(stack, np.diff(grid), basis_state(2))
    pops = np.abs(states) ** 2
    keep = np.unique(np.round(np.linspace(0, steps, points)).astype(int))
    data = np.column_stack([grid[keep] / T, pops[keep, 0], pops[keep, 1], pops[keep, 2]])
    meta = _base_metadata({
        "sweep": "population_trace",
        "scheme": _scheme_meta(schedule.label, schedule),
        "handedness": handedness.value,
        "steps": steps,
        "clamp": clamp,
        "output_points": len(keep),
    })
    return SweepResult(columns=("t_over_T", "p1", "p2", "p3"), data=data, metadata=meta)


def fidelity_curve(spec: SweepSpec) -> SweepResult:
    """Fidelity of every requested scheme against one error amplitude axis."""
    if spec.axis2 is not None:
        raise ValueError("fidelity_curve takes a single error axis")
    axis = spec.axis1
    amplitudes = axis.values
    columns: list[str] = [axis.column]
    meta_schemes = []

    tasks = []  # per scheme: (schedule, clamp, mids, dts, {hand: base}, q)
    for label, schedule in spec.schemes:
        clamp = spec.clamp if spec.clamp is not None else default_clamp(schedule.duration)
        grid = make_grid(schedule.duration, spec.steps)
        mids = 0.5 * (grid[:-1] + grid[1:])
        bases = {}
        if spec.mode in ("exact", "both"):
            for hand in spec.handedness_list:
                bases[hand] = _perturbed_stack(schedule, hand, mids, clamp, 0.0, 0.0)
                columns.append(f"F_{label}_exact_{hand.value}")
        sens = None
        if spec.mode in ("perturbative", "both"):
            measure = q_alpha if axis.kind == "systematic" else q_delta
            sens = measure(schedule, spec.abs_tol)
            columns.append(f"F_{label}_pert")
        tasks.append((schedule, clamp, mids, np.diff(grid), bases, sens))
        meta_schemes.append(_scheme_meta(label, schedule))

    def row(i: int) -> list[float]:
        amp = float(amplitudes[i])
        alpha = amp if axis.kind == "systematic" else 0.0
        delta = amp if axis.kind == "detuning" else 0.0
        out = [amp]
        for schedule, clamp, mids, dts, bases, sens in tasks:
            for hand in spec.handedness_list:
                if hand in bases:
                    out.append(_final_fidelity(schedule, hand, mids, dts, clamp,
                                               alpha, delta, bases[hand].copy()))
            if sens is not None:
                scale = alpha ** 2 if axis.kind == "systematic" else 0.25 * delta ** 2
                out.append(1.0 - scale * sens)
        return out

    rows = _map_indexed(row, len(amplitudes), spec.workers)
    data = np.asarray(rows, dtype=float)
    meta = _base_metadata({
        "sweep": "fidelity_curve",
        "error_axis": f"{axis.kind}[{axis.minimum:g},{axis.maximum:g}]x{axis.points}",
        "mode": spec.mode,
        "handedness": spec.handedness,
        "steps": spec.steps,
        "clamp": spec.clamp if spec.clamp is not None else "default(100/T)",
        "quad_abs_tol": spec.abs_tol,
        "schemes": ";".join(meta_schemes),
    })
    if spec.mode == "both":
        meta.update(_agreement_stats(spec, axis, columns, data))
    return SweepResult(columns=tuple(columns), data=data, metadata=meta)


def _agreement_stats(spec: SweepSpec, axis: ErrorAxis, columns: list[str],
                     data: np.ndarray) -> dict:
    """Exact/perturbative gap inside the quadratic validity window, flagged outside."""
    duration = spec.schemes[0][1].duration
    # validity window: |alpha| <= 0.1, or |delta|*T <= 0.5 for the detuning axis
    window = 0.1 if axis.kind == "systematic" else 0.5 / duration
    inside = np.abs(data[:, 0]) <= window
    stats = {}
    worst_inside = 0.0
    flagged = 0
    for label, _ in spec.schemes:
        pert_col = f"F_{label}_pert"
        if pert_col not in columns:
            continue
        pert = data[:, columns.index(pert_col)]
        for hand in spec.handedness_list:
            exact_col = f"F_{label}_exact_{hand.value}"
            if exact_col not in columns:
                continue
            gap = np.abs(data[:, columns.index(exact_col)] - pert)
            if np.any(inside):
                worst_inside = max(worst_inside, float(np.max(gap[inside])))
            flagged += int(np.sum((gap > 0.01) & ~inside))
    stats["agreement_window"] = f"|{axis.column}|<={window:g}"
    stats["agreement_worst_inside"] = f"{worst_inside:.3e}"
    stats["agreement_flagged_outside"] = flagged
    return stats


def fidelity_heatmap(spec: SweepSpec) -> SweepResult:
    """Exact fidelity on an (alpha, delta) grid with the combined error Hamiltonian.

    Long-format rows (alpha, delta, one fidelity column per handedness); the
    metadata reports the fraction of grid cells with F >= 0.99 and whether
    that region is contiguous around the zero-error point.
    """
    if spec.axis2 is None:
        raise ValueError("fidelity_heatmap needs two error axes")
    if spec.axis1.kind != "systematic" or spec.axis2.kind != "detuning":
        raise ValueError("heatmap axes must be (systematic, detuning)")
    if len(spec.schemes) != 1:
        raise ValueError("fidelity_heatmap sweeps one scheme at a time")
    label, schedule = spec.schemes[0]
    clamp = spec.clamp if spec.clamp is not None else default_clamp(schedule.duration)
    grid = make_grid(schedule.duration, spec.steps)
    mids = 0.5 * (grid[:-1] + grid[1:])
    dts = np.diff(grid)
    bases = {hand: _perturbed_stack(schedule, hand, mids, clamp, 0.0, 0.0)
             for hand in spec.handedness_list}
    alphas, deltas = spec.axis1.values, spec.axis2.values
    pairs = [(a, d) for a in alphas for d in deltas]

    def row(i: int) -> list[float]:
        a, d = pairs[i]
        out = [a, d]
        for hand in spec.handedness_list:
            out.append(_final_fidelity(schedule, hand, mids, dts, clamp,
                                       a, d, bases[hand].copy()))
        return out

    rows = _map_indexed(row, len(pairs), spec.workers)
    data = np.asarray(rows, dtype=float)
    columns = ["alpha", "delta"] + [f"F_exact_{h.value}" for h in spec.handedness_list]
    meta = _base_metadata({
        "sweep": "fidelity_heatmap",
        "scheme": _scheme_meta(label, schedule),
        "alpha_axis": f"[{spec.axis1.minimum:g},{spec.axis1.maximum:g}]x{spec.axis1.points}",
        "delta_axis": f"[{spec.axis2.minimum:g},{spec.axis2.maximum:g}]x{spec.axis2.points}",
        "handedness": spec.handedness,
        "steps": spec.steps,
        "clamp": spec.clamp if spec.clamp is not None else "default(100/T)",
    })
    for hand in spec.handedness_list:
        fgrid = data[:, columns.index(f"F_exact_{hand.value}")].reshape(
            len(alphas), len(deltas))
        fraction, contiguous = high_fidelity_region(fgrid, alphas, deltas)
        meta[f"region_F>=0.99_fraction_{hand.value}"] = f"{fraction:.6g}"
        meta[f"region_F>=0.99_contiguous_{hand.value}"] = contiguous
    return SweepResult(columns=tuple(columns), data=data, metadata=meta)


def high_fidelity_region(fidelities: np.ndarray, alphas: np.ndarray,
                         deltas: np.ndarray, level: float = 0.99) -> tuple[float, bool]:
    """(area fraction, contiguous-around-origin) of the F >= level region."""
    mask = fidelities >= level
    fraction = float(np.mean(mask))
    if not np.any(mask):
        return 0.0, False
    i0 = int(np.argmin(np.abs(alphas)))
    j0 = int(np.argmin(np.abs(deltas)))
    if not mask[i0, j0]:
        return fraction, False
    seen = np.zeros_like(mask, dtype=bool)
    queue = [(i0, j0)]
    seen[i0, j0] = True
    while queue:
        i, j = queue.pop()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < mask.shape[0] and 0 <= b < mask.shape[1]:
                if mask[a, b] and not seen[a, b]:
                    seen[a, b] = True
                    queue.append((a, b))
    return fraction, bool(np.array_equal(seen, mask))


def sensitivity_curve(kind: str, n_range: tuple[float, float], points: int,
                      duration: float = 1.0,
                      abs_tol: float = DEFAULT_ABS_TOL) -> SweepResult:
    """Tabulate q_alpha(n) or q_delta(n) over the ansatz family."""
    key = kind.strip().lower()
    if key in ("systematic", "alpha", "systematicsensitivity"):
        measure, name = q_alpha, "q_alpha"
    elif key in ("detuning", "delta", "detuningsensitivity"):
        measure, name = q_delta, "q_delta"
    else:
        raise ValueError(f"unknown sensitivity kind {kind!r}")
    if points < 2:
        raise ValueError("points must be >= 2")
    ns = np.linspace(float(n_range[0]), float(n_range[1]), points)
    qs = np.array([measure(ansatz_schedule(n, duration), abs_tol) for n in ns])
    meta = _base_metadata({
        "sweep": "sensitivity_curve",
        "kind": name,
        "n_range": f"[{n_range[0]:g},{n_range[1]:g}]x{points}",
        "T": duration,
        "quad_abs_tol": abs_tol,
    })
    return SweepResult(columns=("n", name), data=np.column_stack([ns, qs]),
                       metadata=meta)


def exact_fidelity_point(schedule: InvariantSchedule, error: ErrorModel,
                         handedness: Handedness, steps: int = 4000,
                         clamp: float | None = None) -> float:
    """Single exact-propagation fidelity; convenience wrapper used by the CLI."""
    if clamp is None:
        clamp = default_clamp(schedule.duration)
    grid = make_grid(schedule.duration, steps)
    mids = 0.5 * (grid[:-1] + grid[1:])
    return _final_fidelity(schedule, handedness, mids, np.diff(grid), clamp,
                           error.alpha, error.delta)


__all__ = [
    "ErrorAxis", "SweepSpec", "SweepResult",
    "population_trace", "fidelity_curve", "fidelity_heatmap",
    "sensitivity_curve", "high_fidelity_region", "exact_fidelity_point",
    "perturbative_fidelity",
]
