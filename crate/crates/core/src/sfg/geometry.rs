use std::f64::consts::FRAC_PI_2;

use crate::dispersion::{refract_internal, sfg_mismatch, CrystalAxes, Material};
use crate::units::wavelength_um_from_omega;
use crate::{Error, Result};

/// Which transfer function the SFG crystal is modelled with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    PlaneWave,
    Gaussian,
}

/// Geometry of the SFG crystal and the focused PDC beam, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusGeometry {
    pub kind: KernelKind,
    /// Crystal length D along the facet normal, m.
    pub length_m: f64,
    /// Confocal parameter b, m. Unused by the plane-wave kernel.
    pub confocal_m: f64,
    /// Waist position inside the crystal, measured along the ray from the
    /// entrance facet, m.
    pub focus_m: f64,
    /// External angle of incidence, rad.
    pub alpha: f64,
    pub beta: f64,
}

impl FocusGeometry {
    pub fn plane_wave(length_m: f64) -> Result<Self> {
        let g = Self {
            kind: KernelKind::PlaneWave,
            length_m,
            confocal_m: f64::INFINITY,
            focus_m: 0.0,
            alpha: 0.0,
            beta: 1.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn gaussian(length_m: f64, confocal_m: f64, focus_m: f64) -> Result<Self> {
        let g = Self {
            kind: KernelKind::Gaussian,
            length_m,
            confocal_m,
            focus_m,
            alpha: 0.0,
            beta: 1.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        let g = Self { alpha, ..self };
        g.validate()?;
        Ok(g)
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        let g = Self { beta, ..self };
        g.validate()?;
        Ok(g)
    }

    /// `b = κ₀·w₀²` with κ₀ the extraordinary wavenumber of `material` at `omega0`.
    pub fn confocal_from_waist(material: &Material, waist_m: f64, omega0: f64) -> Result<f64> {
        if !(waist_m > 0.0 && waist_m.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "waist must be positive, got {waist_m}"
            )));
        }
        let n = material.principal_extraordinary(wavelength_um_from_omega(omega0))?;
        let kappa0 = n * omega0 / crate::units::SPEED_OF_LIGHT;
        Ok(kappa0 * waist_m * waist_m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidArgument(format!(
                "{what} must be positive and finite, got {v}"
            )))
        };
        if !(self.length_m > 0.0 && self.length_m.is_finite()) {
            return bad("crystal length", self.length_m);
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("kernel scale", self.beta);
        }
        if self.kind == KernelKind::Gaussian
            && !(self.confocal_m > 0.0 && self.confocal_m.is_finite())
        {
            return bad("confocal parameter", self.confocal_m);
        }
        if !self.focus_m.is_finite() {
            return Err(Error::InvalidArgument(
                "waist position must be finite".into(),
            ));
        }
        if !(self.alpha.abs() < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "incidence angle {} rad must be below pi/2 in magnitude",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// SFG crystal with resolved internal geometry.
#[derive(Debug, Clone)]
pub struct SfgSetup {
    crystal: Material,
    geometry: FocusGeometry,
    axes: CrystalAxes,
    internal_angle: f64,
    effective_length_m: f64,
}

impl SfgSetup {
    /// Refracts the beam into the crystal using the principal extraordinary
    /// index at `omega0` (the degenerate fundamental).
    pub fn new(crystal: Material, geometry: FocusGeometry, omega0: f64) -> Result<Self> {
        geometry.validate()?;
        let reference_um = wavelength_um_from_omega(omega0);
        let internal_angle = refract_internal(&crystal, geometry.alpha, reference_um)?;
        let axes = CrystalAxes::facet_parallel(&crystal, geometry.alpha, reference_um)?;
        let effective_length_m = geometry.length_m / internal_angle.cos();
        Ok(Self {
            crystal,
            geometry,
            axes,
            internal_angle,
            effective_length_m,
        })
    }

    pub fn crystal(&self) -> &Material {
        &self.crystal
    }

    pub fn geometry(&self) -> &FocusGeometry {
        &self.geometry
    }

    pub fn axes(&self) -> &CrystalAxes {
        &self.axes
    }

    pub fn internal_angle(&self) -> f64 {
        self.internal_angle
    }

    /// Path length through the crystal along the internal ray, m.
    pub fn effective_length_m(&self) -> f64 {
        self.effective_length_m
    }

    /// `Δκ(ω, Ω)` along the internal ray, 1/m.
    pub fn mismatch(&self, omega: f64, sum: f64) -> Result<f64> {
        sfg_mismatch(&self.crystal, omega, sum, &self.axes)
    }
}
