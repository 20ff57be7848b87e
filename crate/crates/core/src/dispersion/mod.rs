//! Refractive-index models and the wavevector, mismatch and chirp functions
//! built on them.

mod material;
mod mismatch;

pub use material::{Material, MaterialKind, MaterialLibrary, Polarization, Sellmeier};
pub use mismatch::{
    chirp_phase, pdc_mismatch, phase_matching_angle, refract_internal, sfg_mismatch, CrystalAxes,
};
