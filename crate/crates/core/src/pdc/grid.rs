use crate::units::{omega_from_wavelength_nm, wavelength_nm_from_omega};
use crate::{Error, Result};

/// Uniform sampling of angular frequency shared by every spectral object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    n_points: usize,
    omega_min: f64,
    omega_max: f64,
}

impl FrequencyGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n_points: usize, omega_min: f64, omega_max: f64) -> Result<Self> {
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {} points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy 0 < min < max, got [{omega_min}, {omega_max}]"
            )));
        }
        Ok(Self {
            n_points,
            omega_min,
            omega_max,
        })
    }

    /// Grid covering the wavelength interval `[lambda_min_nm, lambda_max_nm]`.
    pub fn from_wavelengths_nm(
        n_points: usize,
        lambda_min_nm: f64,
        lambda_max_nm: f64,
    ) -> Result<Self> {
        if !(lambda_min_nm > 0.0 && lambda_max_nm > lambda_min_nm) {
            return Err(Error::InvalidArgument(format!(
                "wavelength bounds must satisfy 0 < min < max, got [{lambda_min_nm}, {lambda_max_nm}]"
            )));
        }
        Self::new(
            n_points,
            omega_from_wavelength_nm(lambda_max_nm),
            omega_from_wavelength_nm(lambda_min_nm),
        )
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// Grid step Δω, also the quadrature weight of every sample.
    pub fn step(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.n_points - 1) as f64
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.omega_min + i as f64 * self.step()
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.omega(i)).collect()
    }

    pub fn wavelengths_nm(&self) -> Vec<f64> {
        (0..self.n_points)
            .map(|i| wavelength_nm_from_omega(self.omega(i)))
            .collect()
    }

    /// Index of the sample closest to `omega` (clamped to the grid).
    pub fn nearest_index(&self, omega: f64) -> usize {
        let x = ((omega - self.omega_min) / self.step()).round();
        x.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}
