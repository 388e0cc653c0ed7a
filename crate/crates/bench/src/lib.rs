//! Fixtures shared by the benchmarks.

use uscsim::hilbert::FockTruncation;
use uscsim::nonclassical::{ground_state, reduce, Subsystem};
use uscsim::{DensityMatrix, PureState, SystemParams};

/// Deep double-well point: ħω0/Δ = 0.1, λ = 2.5 ħω0.
pub fn supercritical() -> SystemParams {
    SystemParams::new(10.0, 0.0, 2.5)
}

pub fn truncation(n_max: usize) -> FockTruncation {
    FockTruncation::new(n_max).expect("valid n_max")
}

pub fn ground(n_max: usize) -> PureState {
    ground_state(&supercritical(), &truncation(n_max)).expect("ground state")
}

/// Reduced oscillator state of the supercritical ground state.
pub fn cat_oscillator(n_max: usize) -> DensityMatrix {
    reduce(&ground(n_max), Subsystem::Oscillator).expect("reduce")
}
