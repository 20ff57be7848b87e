use std::io::{self, Write};

use faer::{Mat, MatRef};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{SumGrid, TransferKernel};
use crate::dispersion::chirp_phase;
use crate::pdc::SchmidtDecomposition;
use crate::units::wavelength_nm_from_omega;
use crate::{Error, Result};

/// SFG photon-number spectrum split into its coherent and incoherent terms,
/// arbitrary units.
#[derive(Debug, Clone, PartialEq)]
pub struct SfgSpectrum {
    sum_grid: SumGrid,
    coherent: Vec<f64>,
    incoherent: Vec<f64>,
    total: Vec<f64>,
    corrected: bool,
}

impl SfgSpectrum {
    pub fn from_parts(sum_grid: SumGrid, coherent: Vec<f64>, incoherent: Vec<f64>) -> Result<Self> {
        if coherent.len() != sum_grid.len() || incoherent.len() != sum_grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} sum points but {} coherent and {} incoherent samples",
                sum_grid.len(),
                coherent.len(),
                incoherent.len()
            )));
        }
        if coherent
            .iter()
            .chain(&incoherent)
            .any(|x| !(*x >= 0.0) || !x.is_finite())
        {
            return Err(Error::InvalidArgument(
                "spectral components must be finite and nonnegative".into(),
            ));
        }
        let total = coherent
            .iter()
            .zip(&incoherent)
            .map(|(c, i)| c + i)
            .collect();
        Ok(Self {
            sum_grid,
            coherent,
            incoherent,
            total,
            corrected: false,
        })
    }

    pub fn sum_grid(&self) -> &SumGrid {
        &self.sum_grid
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.sum_grid.omegas()
    }

    pub fn wavelengths_nm(&self) -> Vec<f64> {
        self.sum_grid.wavelengths_nm()
    }

    pub fn coherent(&self) -> &[f64] {
        &self.coherent
    }

    pub fn incoherent(&self) -> &[f64] {
        &self.incoherent
    }

    pub fn total(&self) -> &[f64] {
        &self.total
    }

    pub fn is_corrected(&self) -> bool {
        self.corrected
    }

    /// Columns `wavelength_nm coherent incoherent total`, one row per sum
    /// point in increasing wavelength; `header` lines are written first with
    /// a `# ` prefix.
    pub fn write_table<W: Write>(&self, mut w: W, header: &[String]) -> io::Result<()> {
        for h in header {
            writeln!(w, "# {h}")?;
        }
        writeln!(w, "# lambda_correction {}", self.corrected)?;
        writeln!(w, "# columns: wavelength_nm coherent incoherent total")?;
        let lambdas = self.wavelengths_nm();
        for k in (0..self.sum_grid.len()).rev() {
            writeln!(
                w,
                "{:.6}\t{:.10e}\t{:.10e}\t{:.10e}",
                lambdas[k], self.coherent[k], self.incoherent[k], self.total[k]
            )?;
        }
        Ok(())
    }
}

/// Multiplies every mode by `exp(i·½·GDD·(ω−ω₀)²)`.
pub fn apply_chirp(
    decomp: &SchmidtDecomposition,
    gdd_fs2: f64,
    omega0: f64,
) -> SchmidtDecomposition {
    if gdd_fs2 == 0.0 {
        return decomp.clone();
    }
    let grid = decomp.grid();
    let phases: Vec<Complex64> = (0..grid.len())
        .map(|i| Complex64::from_polar(1.0, chirp_phase(grid.omega(i), gdd_fs2, omega0)))
        .collect();
    let modes = decomp.modes();
    let chirped = Mat::from_fn(modes.nrows(), modes.ncols(), |i, n| {
        modes[(i, n)] * phases[i]
    });
    decomp.with_modes(chirped)
}

fn check_grids(decomp: &SchmidtDecomposition, kernel: &TransferKernel) -> Result<()> {
    if decomp.grid() != kernel.grid() {
        return Err(Error::GridMismatch(format!(
            "decomposition grid {:?} differs from kernel grid {:?}",
            decomp.grid(),
            kernel.grid()
        )));
    }
    Ok(())
}

/// `I_nm(Ω) = Σ_j K(ω_j, Ω)·uₙ[j]·uₘ[m−j]` at the `position`-th point of the
/// kernel's sum grid, over the retained modes.
pub fn intermodal_integrals(
    decomp: &SchmidtDecomposition,
    kernel: &TransferKernel,
    position: usize,
) -> Result<Mat<Complex64>> {
    check_grids(decomp, kernel)?;
    if position >= kernel.sum_grid().len() {
        return Err(Error::InvalidArgument(format!(
            "sum position {position} out of range ({} points)",
            kernel.sum_grid().len()
        )));
    }
    Ok(integrals_at(decomp.modes(), kernel, position))
}

fn integrals_at(
    modes: MatRef<'_, Complex64>,
    kernel: &TransferKernel,
    position: usize,
) -> Mat<Complex64> {
    let m = kernel.sum_grid().indices()[position];
    let lo = *SumGrid::pair_range(modes.nrows(), m).start();
    let column = kernel.column(position);
    let len = column.len();
    let weighted = Mat::from_fn(len, modes.ncols(), |r, n| column[r] * modes[(lo + r, n)]);
    let partner = Mat::from_fn(len, modes.ncols(), |r, n| modes[(m - lo - r, n)]);
    weighted.transpose() * partner
}

/// Coherent `|Σₙ CₙSₙIₙₙ|²` and incoherent `2·Σₙₘ Sₙ²Sₘ²|Iₙₘ|²` terms at
/// every point of the kernel's sum grid.
pub fn sfg_spectrum(decomp: &SchmidtDecomposition, kernel: &TransferKernel) -> Result<SfgSpectrum> {
    check_grids(decomp, kernel)?;
    let gains = decomp.gains();
    let sc: Vec<f64> = gains.iter().map(|g| g.sinh * g.cosh).collect();
    let s2: Vec<f64> = gains.iter().map(|g| g.sinh * g.sinh).collect();
    let modes = decomp.modes();
    let parts: Vec<(f64, f64)> = (0..kernel.sum_grid().len())
        .into_par_iter()
        .map(|pos| {
            let i = integrals_at(modes, kernel, pos);
            let mut amp = Complex64::new(0.0, 0.0);
            for n in 0..sc.len() {
                amp += i[(n, n)] * sc[n];
            }
            let mut inc = 0.0;
            for b in 0..s2.len() {
                let mut col = 0.0;
                for a in 0..s2.len() {
                    col += s2[a] * i[(a, b)].norm_sqr();
                }
                inc += s2[b] * col;
            }
            (amp.norm_sqr(), 2.0 * inc)
        })
        .collect();
    let (coherent, incoherent) = parts.into_iter().unzip();
    SfgSpectrum::from_parts(kernel.sum_grid().clone(), coherent, incoherent)
}

/// Multiplies both terms by `(λ_ref/λ)⁴` when `enable` is set.
pub fn detection_correction(
    spectrum: &SfgSpectrum,
    enable: bool,
    reference_wavelength_nm: f64,
) -> Result<SfgSpectrum> {
    if !enable {
        return Ok(spectrum.clone());
    }
    if spectrum.corrected {
        return Err(Error::AlreadyCorrected);
    }
    if !(reference_wavelength_nm > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reference wavelength must be positive, got {reference_wavelength_nm}"
        )));
    }
    let factors: Vec<f64> = spectrum
        .omegas()
        .iter()
        .map(|&w| (reference_wavelength_nm / wavelength_nm_from_omega(w)).powi(4))
        .collect();
    let scale = |v: &[f64]| {
        v.iter()
            .zip(&factors)
            .map(|(x, f)| x * f)
            .collect::<Vec<_>>()
    };
    let mut out = SfgSpectrum::from_parts(
        spectrum.sum_grid.clone(),
        scale(&spectrum.coherent),
        scale(&spectrum.incoherent),
    )?;
    out.corrected = true;
    Ok(out)
}
