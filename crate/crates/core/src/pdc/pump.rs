use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::units::{omega_from_wavelength_nm, FS};
use crate::{Error, Result};

/// Transform-limited Gaussian pump pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpPulse {
    pub central_wavelength_nm: f64,
    /// Intensity FWHM duration.
    pub fwhm_duration_fs: f64,
}

impl PumpPulse {
    pub fn new(central_wavelength_nm: f64, fwhm_duration_fs: f64) -> Result<Self> {
        if !(central_wavelength_nm > 0.0 && central_wavelength_nm.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "pump wavelength must be positive, got {central_wavelength_nm} nm"
            )));
        }
        if !(fwhm_duration_fs > 0.0 && fwhm_duration_fs.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "pump duration must be positive, got {fwhm_duration_fs} fs"
            )));
        }
        Ok(Self {
            central_wavelength_nm,
            fwhm_duration_fs,
        })
    }

    pub fn center_omega(&self) -> f64 {
        omega_from_wavelength_nm(self.central_wavelength_nm)
    }

    /// FWHM of the spectral intensity in rad/s (`4 ln2 / τ` for a Gaussian).
    pub fn intensity_fwhm_omega(&self) -> f64 {
        4.0 * LN_2 / (self.fwhm_duration_fs * FS)
    }

    /// Standard deviation of the Gaussian spectral amplitude
    /// `exp(-(ω-ω_p)²/(2σ²))`.
    pub fn amplitude_sigma(&self) -> f64 {
        self.intensity_fwhm_omega() / (2.0 * LN_2.sqrt())
    }

    /// Spectral amplitude, unit peak, zero phase.
    pub fn amplitude(&self, omega: f64) -> Complex64 {
        let x = (omega - self.center_omega()) / self.amplitude_sigma();
        Complex64::new((-0.5 * x * x).exp(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_peak_and_even() {
        let p = PumpPulse::new(800.0, 1600.0).unwrap();
        let c = p.center_omega();
        assert_eq!(p.amplitude(c), Complex64::new(1.0, 0.0));
        let d = 7.3e11;
        assert!((p.amplitude(c + d) - p.amplitude(c - d)).norm() < 1e-15);
    }

    #[test]
    fn time_bandwidth_product() {
        // 0.441 / 1.6 ps = 0.2756 THz intensity FWHM
        let p = PumpPulse::new(800.0, 1600.0).unwrap();
        let dnu = p.intensity_fwhm_omega() / (2.0 * PI);
        assert!((dnu - 0.441 / 1.6e-12).abs() / dnu < 2e-3, "{dnu}");
        // the amplitude squared falls to one half at ± FWHM/2
        let c = p.center_omega();
        let half = p.amplitude(c + 0.5 * p.intensity_fwhm_omega()).norm_sqr();
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_duration() {
        assert!(PumpPulse::new(800.0, 0.0).is_err());
        assert!(PumpPulse::new(-1.0, 10.0).is_err());
    }
}
