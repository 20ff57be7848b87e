//! Parametric down-conversion source: frequency grid, pump, joint spectral
//! amplitude, Takagi factorization and the Schmidt-mode description with
//! per-mode parametric gain.

mod grid;
mod jsa;
mod pump;
mod schmidt;
mod takagi;

pub use grid::FrequencyGrid;
pub use jsa::{sinc, JointSpectralAmplitude};
pub use pump::PumpPulse;
pub use schmidt::{schmidt_decompose, ModeGain, SchmidtDecomposition, Truncation};
pub use takagi::{takagi_factorize, Takagi, DEGENERACY_GAP};
