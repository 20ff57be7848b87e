//! Non-phase-matched sum-frequency generation: transfer kernels of the
//! second crystal, inter-modal integrals and the SFG spectrum.

mod geometry;
mod kernel;
mod spectrum;

pub use geometry::{FocusGeometry, KernelKind, SfgSetup};
pub use kernel::{
    focused_from_mismatch, plane_wave_from_mismatch, transfer_focused, transfer_plane_wave,
    SumGrid, TransferKernel,
};
pub use spectrum::{
    apply_chirp, detection_correction, intermodal_integrals, sfg_spectrum, SfgSpectrum,
};
