//! Reduced states and nonclassicality measures of the ground state.

mod density;
mod metrics;
mod phase_space;

pub use density::{qubit_eigenvalues, reduce, DensityMatrix, Subsystem};
pub use metrics::{
    entanglement_entropy, ground_state, ground_state_metrics, mean_x_and_sigma_z, metrics_scan,
    metrics_table, onset_coupling, qubit_entropy, squeezing, GroundStateMetrics, OnsetResult,
    SqueezingReport, ONSET_LAMBDA_MAX,
};
pub use phase_space::{
    cell_area, q_function, wigner_function, x_marginal, FieldKind, PhaseGrid, PhaseSpaceField,
};
