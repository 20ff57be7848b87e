//! Scalar observables extracted from spectra.

mod fringe;
mod width;

pub use fringe::{fringe_period, smooth3, FRINGE_VISIBILITY};
pub use width::{fwhm, width_ratio, WidthReport};
