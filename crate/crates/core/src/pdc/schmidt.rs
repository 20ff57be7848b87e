use std::io::{self, Write};

use faer::{ColRef, Mat};
use num_complex::Complex64;

use super::{takagi_factorize, FrequencyGrid, JointSpectralAmplitude};
use crate::{Error, Result};

/// Which Schmidt modes are kept after factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Keep modes with `λₙ ≥ eps_rel·λ₁`.
    pub eps_rel: f64,
    pub max_modes: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            eps_rel: 1e-4,
            max_modes: 128,
        }
    }
}

/// Parametric gain of one mode with `sinh` and `cosh` cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGain {
    pub gamma: f64,
    pub sinh: f64,
    pub cosh: f64,
}

impl ModeGain {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            sinh: gamma.sinh(),
            cosh: gamma.cosh(),
        }
    }
}

/// Schmidt modes of a JSA with their parametric gains.
///
/// Modes are stored as unit vectors `uₙ[i] = φₙ(ωᵢ)·√Δω`, so that
/// orthonormality does not depend on the grid.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    grid: FrequencyGrid,
    modes: Mat<Complex64>,
    eigenvalues: Vec<f64>,
    gains: Vec<ModeGain>,
    gamma1: f64,
}

pub fn schmidt_decompose(
    jsa: &JointSpectralAmplitude,
    gamma1: f64,
    truncation: Truncation,
) -> Result<SchmidtDecomposition> {
    if !(gamma1 >= 0.0 && gamma1.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gain must be finite and nonnegative, got {gamma1}"
        )));
    }
    if !(truncation.eps_rel >= 0.0) || truncation.max_modes == 0 {
        return Err(Error::InvalidArgument(
            "truncation needs eps_rel >= 0 and max_modes >= 1".into(),
        ));
    }
    let takagi = takagi_factorize(jsa.values())?;
    let eigenvalues: Vec<f64> = takagi.sigma.iter().map(|s| s * s).collect();
    let lead = eigenvalues[0];
    let kept = eigenvalues
        .iter()
        .take_while(|&&l| l >= truncation.eps_rel * lead && l > 0.0)
        .count()
        .min(truncation.max_modes)
        .max(1);
    let modes = takagi.u.subcols(0, kept).to_owned();
    let mut d = SchmidtDecomposition {
        grid: *jsa.grid(),
        modes,
        eigenvalues,
        gains: Vec::new(),
        gamma1,
    };
    d.gains = d.gains_for(gamma1);
    Ok(d)
}

impl SchmidtDecomposition {
    fn gains_for(&self, gamma1: f64) -> Vec<ModeGain> {
        let s1 = self.eigenvalues[0].sqrt();
        (0..self.modes.ncols())
            .map(|n| ModeGain::new(gamma1 * self.eigenvalues[n].sqrt() / s1))
            .collect()
    }

    /// Same modes with the gain rescaled so the first mode has `gamma1`.
    pub fn with_gain(&self, gamma1: f64) -> Result<Self> {
        if !(gamma1 >= 0.0 && gamma1.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gain must be finite and nonnegative, got {gamma1}"
            )));
        }
        let mut out = self.clone();
        out.gains = out.gains_for(gamma1);
        out.gamma1 = gamma1;
        Ok(out)
    }

    /// Same eigenvalues and gains with new mode vectors (used by chirping).
    pub(crate) fn with_modes(&self, modes: Mat<Complex64>) -> Self {
        debug_assert_eq!(modes.nrows(), self.modes.nrows());
        debug_assert_eq!(modes.ncols(), self.modes.ncols());
        Self {
            modes,
            ..self.clone()
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// Number of retained modes M.
    pub fn mode_count(&self) -> usize {
        self.modes.ncols()
    }

    pub fn modes(&self) -> faer::MatRef<'_, Complex64> {
        self.modes.as_ref()
    }

    pub fn mode(&self, n: usize) -> ColRef<'_, Complex64> {
        self.modes.col(n)
    }

    /// All eigenvalues λₙ = σₙ² before truncation, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn gains(&self) -> &[ModeGain] {
        &self.gains
    }

    /// `N_PDC(ωᵢ) = Σₙ Sₙ² |φₙ(ωᵢ)|²`, photons per unit angular frequency.
    pub fn pdc_spectrum(&self) -> Vec<f64> {
        let inv_dw = self.grid.step().recip();
        (0..self.grid.len())
            .map(|i| {
                let mut acc = 0.0;
                for (n, g) in self.gains.iter().enumerate() {
                    acc += g.sinh * g.sinh * self.modes[(i, n)].norm_sqr();
                }
                acc * inv_dw
            })
            .collect()
    }

    /// Effective number of modes `[Σₙ (Sₙ²/Σₘ Sₘ²)²]⁻¹` over retained modes.
    pub fn schmidt_number(&self) -> Result<f64> {
        let total: f64 = self.gains.iter().map(|g| g.sinh * g.sinh).sum();
        if !(total > 0.0) {
            return Err(Error::AllModesVacuum);
        }
        let purity: f64 = self
            .gains
            .iter()
            .map(|g| {
                let w = g.sinh * g.sinh / total;
                w * w
            })
            .sum();
        Ok(purity.recip())
    }

    /// `max |⟨φₙ, φₘ⟩ − δₙₘ|` over retained modes.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.modes.adjoint() * &self.modes;
        let mut d: f64 = 0.0;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let t = if i == j { 1.0 } else { 0.0 };
                d = d.max((g[(i, j)] - t).norm());
            }
        }
        d
    }

    /// Largest fraction of any retained mode's norm found in the outer
    /// `margin` samples on either side of the grid.
    pub fn edge_mass(&self, margin: usize) -> f64 {
        let n = self.grid.len();
        let margin = margin.min(n / 2);
        (0..self.mode_count())
            .map(|k| {
                let c = self.modes.col(k);
                (0..margin)
                    .chain(n - margin..n)
                    .map(|i| c[i].norm_sqr())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Plain-text dump: a header, one row per retained mode with
    /// `n λ Γ S C`, then the mode table with interleaved re/im columns.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# schmidt decomposition")?;
        writeln!(w, "# grid_points {}", self.grid.len())?;
        writeln!(w, "# omega_min_rad_s {:.12e}", self.grid.omega_min())?;
        writeln!(w, "# omega_step_rad_s {:.12e}", self.grid.step())?;
        writeln!(w, "# gamma1 {:.12e}", self.gamma1)?;
        writeln!(w, "# retained_modes {}", self.mode_count())?;
        writeln!(w, "# columns: n lambda gamma sinh cosh")?;
        for (n, g) in self.gains.iter().enumerate() {
            writeln!(
                w,
                "{n}\t{:.12e}\t{:.12e}\t{:.12e}\t{:.12e}",
                self.eigenvalues[n], g.gamma, g.sinh, g.cosh
            )?;
        }
        writeln!(
            w,
            "# modes: omega_rad_s then re_0 im_0 re_1 im_1 ... (unit vectors)"
        )?;
        for i in 0..self.grid.len() {
            write!(w, "{:.12e}", self.grid.omega(i))?;
            for n in 0..self.mode_count() {
                let z = self.modes[(i, n)];
                write!(w, "\t{:.12e}\t{:.12e}", z.re, z.im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
