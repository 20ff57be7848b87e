//! Unit conversions. Internally everything is SI: angular frequency in rad/s,
//! lengths in metres. Sellmeier formulas take wavelengths in micrometres.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const FS: f64 = 1e-15;
pub const FS2: f64 = 1e-30;
pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;
pub const MM: f64 = 1e-3;

pub fn omega_from_wavelength_nm(nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (nm * NM)
}

pub fn wavelength_nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega / NM
}

pub fn wavelength_um_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega / UM
}

/// Wavelength width (nm) of an angular-frequency interval `d_omega` centred at `omega`.
pub fn nm_width_at(omega: f64, d_omega: f64) -> f64 {
    let lambda = 2.0 * PI * SPEED_OF_LIGHT / omega;
    lambda * lambda * d_omega / (2.0 * PI * SPEED_OF_LIGHT) / NM
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        let w = omega_from_wavelength_nm(1600.0);
        assert!((wavelength_nm_from_omega(w) - 1600.0).abs() < 1e-9);
        assert!((wavelength_um_from_omega(w) - 1.6).abs() < 1e-12);
    }

    #[test]
    fn doubling_frequency_halves_wavelength() {
        let w = omega_from_wavelength_nm(1600.0);
        assert!((wavelength_nm_from_omega(2.0 * w) - 800.0).abs() < 1e-9);
    }
}
