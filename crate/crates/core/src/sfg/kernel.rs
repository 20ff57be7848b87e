use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{FocusGeometry, KernelKind, SfgSetup};
use crate::pdc::{sinc, FrequencyGrid};
use crate::quadrature::{integrate, QuadOptions};
use crate::units::wavelength_nm_from_omega;
use crate::{Error, Result};

const DIRECT_REL_TOL: f64 = 1e-8;
const TABLE_REL_TOL: f64 = 1e-10;
/// Table spacing in units of `2/D` (the demodulated kernel varies on that scale).
const TABLE_STEP: f64 = 0.05;
const MAX_PANELS: usize = 400_000;

/// `β·D·sinc(ΔκD/2)·e^{−iΔκD/2}`.
pub fn plane_wave_from_mismatch(dk: f64, length_m: f64, beta: f64) -> Complex64 {
    let x = 0.5 * dk * length_m;
    Complex64::from_polar(beta * length_m * sinc(x), -x)
}

/// `β·∫₀ᴰ e^{−iΔκz} / (1 + 2i(z−z₀)/b) dz` by adaptive quadrature.
pub fn focused_from_mismatch(
    dk: f64,
    length_m: f64,
    confocal_m: f64,
    focus_m: f64,
    beta: f64,
) -> Result<Complex64> {
    if !(confocal_m > 0.0 && confocal_m.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "focused kernel needs a finite positive confocal parameter, got {confocal_m}"
        )));
    }
    let g = demodulated(dk, length_m, confocal_m, focus_m, false, DIRECT_REL_TOL)?;
    Ok(g * Complex64::from_polar(beta, -0.5 * dk * length_m))
}

/// Plane-wave kernel at `(ω, Ω)` using the effective path length of `setup`.
pub fn transfer_plane_wave(setup: &SfgSetup, omega: f64, sum: f64) -> Result<Complex64> {
    let dk = setup.mismatch(omega, sum)?;
    Ok(plane_wave_from_mismatch(
        dk,
        setup.effective_length_m(),
        setup.geometry().beta,
    ))
}

/// Gaussian-focus kernel at `(ω, Ω)`, always by direct quadrature.
pub fn transfer_focused(setup: &SfgSetup, omega: f64, sum: f64) -> Result<Complex64> {
    let dk = setup.mismatch(omega, sum)?;
    let g = setup.geometry();
    focused_from_mismatch(
        dk,
        setup.effective_length_m(),
        g.confocal_m,
        g.focus_m,
        g.beta,
    )
}

/// `∫₀ᴰ e^{−iΔκ(z−D/2)} / (1 + 2i(z−z₀)/b) dz`, or with `moment` the
/// Δκ-derivative of it.
fn demodulated(dk: f64, d: f64, b: f64, z0: f64, moment: bool, rel_tol: f64) -> Result<Complex64> {
    let mut width = (d / 16.0).min(0.5 * b);
    if dk != 0.0 {
        width = width.min(std::f64::consts::TAU / (8.0 * dk.abs()));
    }
    let scale = if moment { 0.5 * d * d } else { d };
    let opts = QuadOptions {
        rel_tol,
        abs_tol: 1e-13 * scale,
        initial_panels: (d / width).ceil() as usize,
        max_panels: MAX_PANELS,
    };
    let half = 0.5 * d;
    integrate(
        |z| {
            let s = z - half;
            let lorentz = Complex64::new(1.0, 2.0 * (z - z0) / b);
            let e = Complex64::from_polar(1.0, -dk * s);
            if moment {
                e * Complex64::new(0.0, -s) / lorentz
            } else {
                e / lorentz
            }
        },
        0.0,
        d,
        opts,
    )
    .map(|q| q.value)
}

/// Cubic Hermite table of the demodulated focused kernel over a Δκ interval.
struct FocusedTable {
    start: f64,
    step: f64,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

impl FocusedTable {
    fn build(lo: f64, hi: f64, d: f64, b: f64, z0: f64) -> Result<Self> {
        let step = TABLE_STEP * 2.0 / d;
        let count = (((hi - lo) / step).ceil() as usize).max(1) + 1;
        let points: Vec<(Complex64, Complex64)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let dk = lo + step * i as f64;
                Ok((
                    demodulated(dk, d, b, z0, false, TABLE_REL_TOL)?,
                    demodulated(dk, d, b, z0, true, TABLE_REL_TOL)?,
                ))
            })
            .collect::<Result<_>>()?;
        let (values, slopes) = points.into_iter().unzip();
        Ok(Self {
            start: lo,
            step,
            values,
            slopes,
        })
    }

    fn eval(&self, dk: f64) -> Complex64 {
        let x = (dk - self.start) / self.step;
        let i = (x.floor().max(0.0) as usize).min(self.values.len() - 2);
        let t = x - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.values[i] * h00
            + self.slopes[i] * (h10 * self.step)
            + self.values[i + 1] * h01
            + self.slopes[i + 1] * (h11 * self.step)
    }
}

/// Positions on the sum-frequency lattice `Ω_m = 2ω_min + m·Δω`,
/// `m = 0..2N−1`, at which the SFG spectrum is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SumGrid {
    grid: FrequencyGrid,
    indices: Vec<usize>,
}

impl SumGrid {
    /// Every pairwise sum of grid frequencies.
    pub fn full(grid: FrequencyGrid) -> Self {
        Self {
            indices: (0..Self::lattice_len(&grid)).collect(),
            grid,
        }
    }

    pub fn from_indices(grid: FrequencyGrid, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("sum grid is empty".into()));
        }
        let n = Self::lattice_len(&grid);
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices[indices.len() - 1] >= n {
            return Err(Error::InvalidArgument(format!(
                "sum indices must be strictly increasing and below {n}"
            )));
        }
        Ok(Self { grid, indices })
    }

    /// Lattice points with sum wavelength inside `[lo_nm, hi_nm]`.
    pub fn window_nm(grid: FrequencyGrid, lo_nm: f64, hi_nm: f64) -> Result<Self> {
        let indices = (0..Self::lattice_len(&grid))
            .filter(|&m| {
                let l = wavelength_nm_from_omega(Self::lattice_omega(&grid, m));
                l >= lo_nm && l <= hi_nm
            })
            .collect();
        Self::from_indices(grid, indices)
    }

    /// The single lattice point closest to `wavelength_nm`.
    pub fn nearest_nm(grid: FrequencyGrid, wavelength_nm: f64) -> Result<Self> {
        let target = crate::units::omega_from_wavelength_nm(wavelength_nm);
        let x = (target - 2.0 * grid.omega_min()) / grid.step();
        let last = Self::lattice_len(&grid) - 1;
        if !(x > -0.5 && x < last as f64 + 0.5) {
            return Err(Error::InvalidArgument(format!(
                "{wavelength_nm} nm is outside the sum-frequency band"
            )));
        }
        Self::from_indices(grid, vec![(x.round() as usize).min(last)])
    }

    pub fn lattice_len(grid: &FrequencyGrid) -> usize {
        2 * grid.len() - 1
    }

    fn lattice_omega(grid: &FrequencyGrid, m: usize) -> f64 {
        2.0 * grid.omega_min() + m as f64 * grid.step()
    }

    /// Pump-grid indices `j` with `m − j` also on the grid.
    pub fn pair_range(n_points: usize, m: usize) -> RangeInclusive<usize> {
        m.saturating_sub(n_points - 1)..=m.min(n_points - 1)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn omega(&self, k: usize) -> f64 {
        Self::lattice_omega(&self.grid, self.indices[k])
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.omega(k)).collect()
    }

    pub fn wavelengths_nm(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| wavelength_nm_from_omega(self.omega(k)))
            .collect()
    }

    /// Lattice step in wavelength near `omega`, nm.
    pub fn step_nm_at(&self, omega: f64) -> f64 {
        crate::units::nm_width_at(omega, self.grid.step())
    }
}

/// Kernel values `K(ω_j, Ω_m)` for every sum point and every admissible pair.
///
/// Column `k` holds the entries for `j` in [`SumGrid::pair_range`] of the
/// k-th sum point, in increasing `j`.
#[derive(Debug, Clone)]
pub struct TransferKernel {
    sum_grid: SumGrid,
    columns: Vec<Vec<Complex64>>,
    kind: Option<KernelKind>,
}

impl TransferKernel {
    pub fn build(setup: &SfgSetup, sum_grid: &SumGrid) -> Result<Self> {
        let grid = *sum_grid.grid();
        let mismatch: Vec<Vec<f64>> = sum_grid
            .indices()
            .par_iter()
            .map(|&m| {
                let sum = SumGrid::lattice_omega(&grid, m);
                symmetric_column(grid.len(), m, |j| setup.mismatch(grid.omega(j), sum))
            })
            .collect::<Result<_>>()?;

        let g: &FocusGeometry = setup.geometry();
        let d = setup.effective_length_m();
        let columns = match g.kind {
            KernelKind::PlaneWave => mismatch
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|&dk| plane_wave_from_mismatch(dk, d, g.beta))
                        .collect()
                })
                .collect(),
            KernelKind::Gaussian => {
                let (lo, hi) = mismatch
                    .iter()
                    .flatten()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                        (a.min(x), b.max(x))
                    });
                let table = FocusedTable::build(lo, hi, d, g.confocal_m, g.focus_m)?;
                mismatch
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|&dk| {
                                table.eval(dk) * Complex64::from_polar(g.beta, -0.5 * dk * d)
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        Ok(Self {
            sum_grid: sum_grid.clone(),
            columns,
            kind: Some(g.kind),
        })
    }

    /// Kernel from an arbitrary function of `(ω, Ω)`, symmetrized so that
    /// only pairs with `ω ≥ Ω/2` are evaluated.
    pub fn from_fn(sum_grid: &SumGrid, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let grid = *sum_grid.grid();
        let columns = sum_grid
            .indices()
            .par_iter()
            .map(|&m| {
                let sum = SumGrid::lattice_omega(&grid, m);
                symmetric_column(grid.len(), m, |j| Ok::<_, Error>(f(grid.omega(j), sum)))
                    .expect("infallible")
            })
            .collect();
        Self {
            sum_grid: sum_grid.clone(),
            columns,
            kind: None,
        }
    }

    pub fn constant(sum_grid: &SumGrid, value: Complex64) -> Self {
        Self::from_fn(sum_grid, |_, _| value)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.sum_grid.grid()
    }

    pub fn sum_grid(&self) -> &SumGrid {
        &self.sum_grid
    }

    /// `None` for kernels built with [`TransferKernel::from_fn`].
    pub fn kind(&self) -> Option<KernelKind> {
        self.kind
    }

    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.columns[k]
    }

    /// `K(ω_j, Ω)` at the k-th sum point; zero when `Ω − ω_j` is off the grid.
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        let r = SumGrid::pair_range(self.grid().len(), self.sum_grid.indices()[k]);
        if r.contains(&j) {
            self.columns[k][j - r.start()]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Largest `|K|` over all entries.
    pub fn max_abs(&self) -> f64 {
        self.columns
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn symmetric_column<T: Copy, E>(
    n: usize,
    m: usize,
    mut f: impl FnMut(usize) -> std::result::Result<T, E>,
) -> std::result::Result<Vec<T>, E> {
    let r = SumGrid::pair_range(n, m);
    let (lo, hi) = (*r.start(), *r.end());
    let mut out = Vec::with_capacity(hi - lo + 1);
    // upper half j ≥ m − j, then mirror
    let first = m.div_ceil(2);
    let mut upper = Vec::with_capacity(hi + 1 - first);
    for j in first..=hi {
        upper.push(f(j)?);
    }
    for j in lo..first {
        out.push(upper[m - j - first]);
    }
    out.extend_from_slice(&upper);
    Ok(out)
}
