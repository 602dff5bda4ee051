"""Invariant-based pulse design for cyclic three-level chiral discrimination.

The package designs one shared pulse pair that drives left- and right-handed
cyclic three-level systems from |2> to |3> and |1> respectively, verifies the
transfer by exact propagation, and optimizes the schedule family against
systematic and detuning errors.
"""

from ._version import __version__
from .dynamics import (
    Handedness,
    QuantumState,
    RabiSample,
    Trajectory,
    basis_state,
    build_general_hamiltonian,
    build_hamiltonian,
    fidelity,
    make_grid,
    propagate,
)
from .errors import (
    ChiralPulseError,
    ClampViolation,
    GridTooCoarse,
    NoInteriorMinimum,
    NonFiniteHamiltonian,
    QuadratureFailure,
    SingularTheta,
)
from .invariants import (
    InvariantSchedule,
    LRPhase,
    PulseSchedule,
    ValidationReport,
    ansatz_schedule,
    default_clamp,
    invariant_eigensystem,
    invariant_matrix,
    invariant_matrix_dot,
    lr_phase,
    make_schedule,
    pulses_from_invariant,
    schedule_hamiltonian,
    sps_schedule,
    validate_schedule,
)
from .robustness import (
    ErrorModel,
    OptimumResult,
    SensitivityResult,
    detuning_operator,
    exact_fidelity,
    optimize_n,
    perturbative_fidelity,
    q_alpha,
    q_delta,
    sensitivity_pair,
)
from .sweeps import (
    ErrorAxis,
    SweepResult,
    SweepSpec,
    fidelity_curve,
    fidelity_heatmap,
    high_fidelity_region,
    population_trace,
    sensitivity_curve,
)

__all__ = [
    "__version__",
    # dynamics
    "Handedness", "QuantumState", "RabiSample", "Trajectory", "basis_state",
    "build_hamiltonian", "build_general_hamiltonian", "fidelity", "make_grid",
    "propagate",
    # errors
    "ChiralPulseError", "ClampViolation", "GridTooCoarse", "NoInteriorMinimum",
    "NonFiniteHamiltonian", "QuadratureFailure", "SingularTheta",
    # invariants
    "InvariantSchedule", "LRPhase", "PulseSchedule", "ValidationReport",
    "ansatz_schedule", "default_clamp", "invariant_eigensystem",
    "invariant_matrix", "invariant_matrix_dot", "lr_phase", "make_schedule",
    "pulses_from_invariant", "schedule_hamiltonian", "sps_schedule",
    "validate_schedule",
    # robustness
    "ErrorModel", "OptimumResult", "SensitivityResult", "detuning_operator",
    "exact_fidelity", "optimize_n", "perturbative_fidelity", "q_alpha",
    "q_delta", "sensitivity_pair",
    # sweeps
    "ErrorAxis", "SweepResult", "SweepSpec", "fidelity_curve",
    "fidelity_heatmap", "high_fidelity_region", "population_trace",
    "sensitivity_curve",
]
