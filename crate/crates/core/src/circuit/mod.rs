mod density;
mod estimation_circuit;
mod gates;
mod measure;
mod state;

pub use density::{apply_circuit_density, noisy_control_probabilities};
pub use estimation_circuit::{
    build_estimation_circuit, build_qubit_measurement_circuit, control_output, probe_circuit, probe_state,
    run_estimation, EstimationOutput, QubitBasis, CONTROL_1, CONTROL_2, TARGET,
};
pub use gates::{controlled_gate, hadamard, phase_gate, Circuit, ControlledKind, GateOp, WireLayout};
pub use measure::{
    basis_change, born_probabilities, gm_measurement_vectors, sample_counts, tilde_h_operator, validate_distribution,
    BasisTag, ControlState, MeasurementCounts, SIMPLEX_TOL,
};
pub use state::{apply_circuit, embed, normalized, DensityState, PureState, NORM_TOL};
