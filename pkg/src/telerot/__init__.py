"""Probabilistic teleportation of rotations and receiver-encoded secret sharing.

A dealer entangles a message qubit with a GHZ state shared by n receivers;
the receivers' local rotations and measurements leave the message rotated by
a branch angle the group can jointly reconstruct, so disclosing who measured
what (and the angles used) is a quantum secret sharing scheme in which any
single non-cooperating receiver randomizes the recipient's result.
"""

from .qsim import (
    DensityMatrix,
    HADAMARD,
    IDENTITY,
    MeasurementResult,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    StateVector,
    ZeroProbabilityError,
    apply_cnot,
    apply_cz,
    apply_single,
    apply_swap,
    extract_qubit,
    fidelity_up_to_phase,
    make_rotation,
    measure,
    reduced_density,
    trace_distance,
)
from .protocol import (
    Branch,
    CapacityError,
    RecoveryPlan,
    ScenarioConfig,
    alice_alternative_correction,
    alice_encode,
    alice_finalize,
    compute_phi,
    enumerate_branches,
    prepare,
    receivers_rotate,
    recovery_plan,
    run_sampled,
    two_party_run,
)
from .analysis import (
    AngleDistributionSpec,
    BlochState,
    FidelityStats,
    average_fidelity,
    hillery_share_density,
    protocol_phi_samples,
    receiver_leakage,
    rotation_fidelity,
    sigma_y_eigenstate_invariance,
)
from .parties import (
    ClassicalMessage,
    PartyId,
    Transcript,
    non_cooperation_average,
    run_secret_sharing,
    validate_transcript,
)

__version__ = "0.1.0"

__all__ = [
    "AngleDistributionSpec",
    "BlochState",
    "Branch",
    "CapacityError",
    "ClassicalMessage",
    "DensityMatrix",
    "FidelityStats",
    "HADAMARD",
    "IDENTITY",
    "MeasurementResult",
    "PartyId",
    "RecoveryPlan",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "ScenarioConfig",
    "StateVector",
    "Transcript",
    "ZeroProbabilityError",
    "alice_alternative_correction",
    "alice_encode",
    "alice_finalize",
    "apply_cnot",
    "apply_cz",
    "apply_single",
    "apply_swap",
    "average_fidelity",
    "compute_phi",
    "enumerate_branches",
    "extract_qubit",
    "fidelity_up_to_phase",
    "hillery_share_density",
    "make_rotation",
    "measure",
    "non_cooperation_average",
    "prepare",
    "protocol_phi_samples",
    "receiver_leakage",
    "receivers_rotate",
    "recovery_plan",
    "reduced_density",
    "rotation_fidelity",
    "run_sampled",
    "run_secret_sharing",
    "sigma_y_eigenstate_invariance",
    "trace_distance",
    "two_party_run",
    "validate_transcript",
]
