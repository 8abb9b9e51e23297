"""Qubit collision-model thermalization: machines, channel, thermodynamics,
entanglement, and collision-order reversal."""

from .linalg import (
    QubitState,
    fidelity,
    is_unitary,
    partial_trace,
    purity,
    tensor,
    trace_distance,
    validate_density,
)
from .machines import (
    CanonicalParams,
    MachineParams,
    build_machine,
    build_v,
    canonical_params,
    gauge_transform,
    haar_qubit_unitary,
    hamiltonian_form,
    is_basis_independent,
    lu_equivalent,
    phase_distance,
    phase_gate,
)
from .channel import (
    BathSpec,
    apply_collision,
    bath_state,
    check_stationarity,
    closed_form_d,
    closed_form_k,
    collision_map,
    decoherence_factor,
    iterate,
    stationarity_deviation,
)
from .thermo import (
    RelaxationRates,
    continuous_d,
    continuous_k_mag,
    discrete_limit_check,
    fd_closed_form,
    fd_closed_form_continuous,
    fd_protocol_curve,
    fd_protocol_simulated,
    fit_relaxation,
    rates_from_machine,
)
from .entanglement import (
    EntanglingPowerResult,
    bloch_state,
    concurrence,
    entangling_power,
    entangling_power_closed,
)
from .trajectories import (
    CollisionRecord,
    JointState,
    ReconstructionReport,
    forward_run,
    reconstruction_experiment,
    reduced_states_check,
    reverse_run,
    sample_reduced_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "QubitState",
    "fidelity",
    "is_unitary",
    "partial_trace",
    "purity",
    "tensor",
    "trace_distance",
    "validate_density",
    "CanonicalParams",
    "MachineParams",
    "build_machine",
    "build_v",
    "canonical_params",
    "gauge_transform",
    "haar_qubit_unitary",
    "hamiltonian_form",
    "is_basis_independent",
    "lu_equivalent",
    "phase_distance",
    "phase_gate",
    "BathSpec",
    "apply_collision",
    "bath_state",
    "check_stationarity",
    "closed_form_d",
    "closed_form_k",
    "collision_map",
    "decoherence_factor",
    "iterate",
    "stationarity_deviation",
    "RelaxationRates",
    "continuous_d",
    "continuous_k_mag",
    "discrete_limit_check",
    "fd_closed_form",
    "fd_closed_form_continuous",
    "fd_protocol_curve",
    "fd_protocol_simulated",
    "fit_relaxation",
    "rates_from_machine",
    "EntanglingPowerResult",
    "bloch_state",
    "concurrence",
    "entangling_power",
    "entangling_power_closed",
    "CollisionRecord",
    "JointState",
    "ReconstructionReport",
    "forward_run",
    "reconstruction_experiment",
    "reduced_states_check",
    "reverse_run",
    "sample_reduced_trajectory",
]
