//! Qubit–oscillator (quantum Rabi model) simulation in the ultrastrong-coupling regime.
//!
//! ```text
//! H = −(Δ/2) σx − (ε/2) σz + ħω0 a†a + λ (a + a†) σz
//! ```

pub mod approx;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod hilbert;
pub mod linalg;
pub mod nonclassical;
mod optim;
pub mod presets;
pub mod spectrum;

pub use decoherence::{NoiseChannel, RatePair};
pub use error::{Error, Result};
pub use hilbert::{FockTruncation, PureState, SystemParams, TruncatedOperator, TruncationOptions};
pub use dynamics::{ProtocolResult, SweepSchedule};
pub use linalg::C64;
pub use nonclassical::{DensityMatrix, PhaseSpaceField, SqueezingReport};
pub use presets::FigurePreset;
pub use spectrum::{EigenSolution, LevelCurveTable, Parity};
