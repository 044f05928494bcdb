//! Estimators mapping measurement statistics to unitary parameters.

mod close_identity;
mod gm;
mod partition;
mod qubit;

pub use close_identity::{
    circular_distance, closeness_measure, conjugate_phase, estimate_close_identity,
    estimate_close_identity_probabilities, phase_errors, reconstruct_coefficients, select_phase_candidate,
    unpaired_phase, CloseIdEstimate, PairedEstimate, ResolvedPhases,
};
pub use gm::{average_relative_error, gm_first_order_estimate, gm_first_order_estimate_probabilities};
pub use partition::{partition_indices, PartitionSets};
pub use qubit::{
    estimate_qubit_no_prior, estimate_qubit_no_prior_probabilities, estimate_qubit_with_octant, qubit_probabilities,
    Octant, QubitAngles, QubitCoefficients, DEGENERATE_TOL, SX_DENOM_TOL, ZERO_PROB_TOL,
};
