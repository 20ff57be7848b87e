use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::units::{wavelength_um_from_omega, SPEED_OF_LIGHT};
use crate::{Error, Result};

const BUNDLED: &str = include_str!("../../data/materials.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaterialKind {
    #[serde(rename = "BBO")]
    Bbo,
    #[serde(rename = "LiNbO3_MgO")]
    LiNbO3Mgo,
}

impl MaterialKind {
    pub fn name(self) -> &'static str {
        match self {
            MaterialKind::Bbo => "BBO",
            MaterialKind::LiNbO3Mgo => "LiNbO3_MgO",
        }
    }
}

impl fmt::Display for MaterialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Ordinary,
    /// Extraordinary wave propagating at `theta` to the optic axis.
    Extraordinary,
}

/// One Sellmeier dispersion formula, see `data/materials.toml` for the form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sellmeier {
    pub a: f64,
    #[serde(default)]
    pub resonances: Vec<[f64; 2]>,
    #[serde(default)]
    pub poles: Vec<[f64; 2]>,
    #[serde(default)]
    pub ir: f64,
}

impl Sellmeier {
    pub fn n_squared(&self, wavelength_um: f64) -> f64 {
        let l2 = wavelength_um * wavelength_um;
        let mut n2 = self.a - self.ir * l2;
        for &[b, c] in &self.resonances {
            n2 += b * l2 / (l2 - c);
        }
        for &[p, q] in &self.poles {
            n2 += p / (l2 - q);
        }
        n2
    }

    fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.a)
            .chain(std::iter::once(self.ir))
            .chain(self.resonances.iter().flatten().copied())
            .chain(self.poles.iter().flatten().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: MaterialKind,
    pub citation: String,
    pub window_um: [f64; 2],
    pub ordinary: Sellmeier,
    pub extraordinary: Sellmeier,
}

impl Material {
    pub fn kind(&self) -> MaterialKind {
        self.name
    }

    fn check_window(&self, wavelength_um: f64) -> Result<()> {
        let [lo, hi] = self.window_um;
        if !(wavelength_um >= lo && wavelength_um <= hi) {
            return Err(Error::OutOfWindow {
                material: self.name.to_string(),
                wavelength_um,
                min_um: lo,
                max_um: hi,
            });
        }
        Ok(())
    }

    /// Refractive index at `wavelength_um`. The extraordinary index at `theta`
    /// follows the uniaxial index ellipse
    /// `1/n² = cos²θ/n_o² + sin²θ/n_e²`; `theta` is ignored for the ordinary wave.
    pub fn refractive_index(
        &self,
        polarization: Polarization,
        wavelength_um: f64,
        theta: f64,
    ) -> Result<f64> {
        self.check_window(wavelength_um)?;
        let no2 = self.ordinary.n_squared(wavelength_um);
        match polarization {
            Polarization::Ordinary => Ok(no2.sqrt()),
            Polarization::Extraordinary => {
                let ne2 = self.extraordinary.n_squared(wavelength_um);
                let (s, c) = theta.sin_cos();
                Ok((c * c / no2 + s * s / ne2).recip().sqrt())
            }
        }
    }

    /// Principal extraordinary index n_e (propagation normal to the optic axis).
    pub fn principal_extraordinary(&self, wavelength_um: f64) -> Result<f64> {
        self.refractive_index(Polarization::Extraordinary, wavelength_um, FRAC_PI_2)
    }

    /// Wavenumber `n(ω) ω / c` in 1/m.
    pub fn wavenumber(&self, polarization: Polarization, omega: f64, theta: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::NonPositiveFrequency(omega));
        }
        let n = self.refractive_index(polarization, wavelength_um_from_omega(omega), theta)?;
        Ok(n * omega / SPEED_OF_LIGHT)
    }

    fn validate(&self) -> Result<()> {
        let field = |f: &str| format!("material.{}.{}", self.name, f);
        let [lo, hi] = self.window_um;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::validation(field("window_um"), "need 0 < min < max"));
        }
        for (label, s) in [
            ("ordinary", &self.ordinary),
            ("extraordinary", &self.extraordinary),
        ] {
            if s.coefficients().any(|c| !c.is_finite()) {
                return Err(Error::validation(field(label), "non-finite coefficient"));
            }
            // n must stay above 1 (and finite) everywhere in the window
            for i in 0..=1000 {
                let l = lo + (hi - lo) * i as f64 / 1000.0;
                let n2 = s.n_squared(l);
                if !(n2 > 1.0 && n2.is_finite()) {
                    return Err(Error::validation(
                        field(label),
                        format!("n^2 = {n2} at {l} um inside the window"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialLibrary {
    #[serde(rename = "material")]
    pub materials: Vec<Material>,
}

impl MaterialLibrary {
    /// The Sellmeier tables shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED).expect("bundled material table is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let lib: MaterialLibrary = toml::from_str(text).map_err(|e| Error::Parse {
            line: crate::experiment::line_of(text, e.span()),
            message: e.message().to_string(),
        })?;
        for m in &lib.materials {
            m.validate()?;
        }
        Ok(lib)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn get(&self, kind: MaterialKind) -> Result<&Material> {
        self.materials
            .iter()
            .find(|m| m.name == kind)
            .ok_or_else(|| Error::validation("material", format!("{kind} missing from table")))
    }
}
