//! Simulation of non-phase-matched sum-frequency generation (SFG) driven by
//! broadband multimode bright squeezed vacuum.
//!
//! The pipeline is:
//!
//! 1. [`pdc`]: joint spectral amplitude of a type-I BBO source, Takagi
//!    factorization into Schmidt modes, per-mode parametric gain.
//! 2. [`sfg::apply_chirp`]: quadratic spectral phase picked up in transit.
//! 3. [`sfg`]: plane-wave and Gaussian-focus transfer kernels of the SFG
//!    crystal, inter-modal integrals and the coherent + incoherent spectrum.
//! 4. [`analysis`]: widths, the incoherent/coherent width ratio and
//!    Maker-fringe periods.
//!
//! [`experiment`] wires everything to validated run configurations, sweeps
//! and the columnar output files consumed by the `sfgsim` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dispersion;
pub mod error;
pub mod experiment;
pub mod pdc;
pub mod quadrature;
pub mod sfg;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analysis::{fringe_period, fwhm, width_ratio, WidthReport};
pub use dispersion::{CrystalAxes, Material, MaterialKind, MaterialLibrary, Polarization};
pub use pdc::{
    schmidt_decompose, takagi_factorize, FrequencyGrid, JointSpectralAmplitude, PumpPulse,
    SchmidtDecomposition, Takagi, Truncation,
};
pub use sfg::{
    apply_chirp, detection_correction, intermodal_integrals, sfg_spectrum, FocusGeometry,
    KernelKind, SfgSetup, SfgSpectrum, SumGrid, TransferKernel,
};
