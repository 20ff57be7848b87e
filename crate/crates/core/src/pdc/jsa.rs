use faer::Mat;
use num_complex::Complex64;

use super::{FrequencyGrid, PumpPulse};
use crate::dispersion::{pdc_mismatch, Material};
use crate::{Error, Result};

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Discretized joint spectral amplitude `F[i][j] ≈ F(ω_i, ω_j)·Δω`, normalized
/// to unit Frobenius norm and exactly symmetric.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    grid: FrequencyGrid,
    values: Mat<Complex64>,
}

impl JointSpectralAmplitude {
    /// Type-I collinear JSA of a crystal of `length_m`:
    /// `f_p(ω_i+ω_s)·sinc(ΔkL/2)·exp(iΔkL/2)`.
    pub fn build(
        grid: FrequencyGrid,
        pump: &PumpPulse,
        crystal: &Material,
        length_m: f64,
        theta: f64,
    ) -> Result<Self> {
        if !(length_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "crystal length must be positive, got {length_m} m"
            )));
        }
        let omegas = grid.omegas();
        let n = grid.len();
        let mut values = Mat::<Complex64>::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let (wi, ws) = (omegas[i], omegas[j]);
                let half_phase = 0.5 * pdc_mismatch(crystal, wi, ws, theta)? * length_m;
                let v = pump.amplitude(wi + ws)
                    * sinc(half_phase)
                    * Complex64::from_polar(1.0, half_phase);
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::finish(grid, values)
    }

    /// JSA sampled from an arbitrary symmetric function of (ω_i, ω_s). Only the
    /// upper triangle is evaluated.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let n = grid.len();
        let mut values = Mat::<Complex64>::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = f(grid.omega(i), grid.omega(j));
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::finish(grid, values)
    }

    /// Wraps an explicit matrix, which must be symmetric within 1e-12 of its
    /// largest entry; it is then symmetrized exactly and normalized.
    pub fn from_matrix(grid: FrequencyGrid, mut values: Mat<Complex64>) -> Result<Self> {
        let n = grid.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::GridMismatch(format!(
                "matrix is {}x{}, grid has {n} points",
                values.nrows(),
                values.ncols()
            )));
        }
        let defect = symmetry_defect(values.as_ref());
        let scale = max_abs(values.as_ref()).max(f64::MIN_POSITIVE);
        if defect > 1e-12 * scale {
            return Err(Error::NotSymmetric { defect });
        }
        for j in 0..n {
            for i in 0..j {
                let v = (values[(i, j)] + values[(j, i)]) * 0.5;
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::finish(grid, values)
    }

    fn finish(grid: FrequencyGrid, mut values: Mat<Complex64>) -> Result<Self> {
        let dw = grid.step();
        let mut norm2 = 0.0;
        for j in 0..values.ncols() {
            for i in 0..values.nrows() {
                values[(i, j)] *= dw;
                norm2 += values[(i, j)].norm_sqr();
            }
        }
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::InvalidArgument(
                "joint spectral amplitude vanishes (or is not finite) on the grid".into(),
            ));
        }
        let inv = norm2.sqrt().recip();
        for j in 0..values.ncols() {
            for i in 0..values.nrows() {
                values[(i, j)] *= inv;
            }
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> faer::MatRef<'_, Complex64> {
        self.values.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[(i, j)]
    }

    pub fn is_symmetric(&self) -> bool {
        symmetry_defect(self.values.as_ref()) == 0.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.norm_l2()
    }

    /// `Σ_j |F[i][j]|²`, the low-gain single-photon spectrum (up to Δω).
    pub fn marginal(&self) -> Vec<f64> {
        let n = self.grid.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.values[(i, j)].norm_sqr()).sum())
            .collect()
    }
}

pub(crate) fn symmetry_defect(m: faer::MatRef<'_, Complex64>) -> f64 {
    let mut d: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..j {
            d = d.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    d
}

pub(crate) fn max_abs(m: faer::MatRef<'_, Complex64>) -> f64 {
    let mut d: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            d = d.max(m[(i, j)].norm());
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{MaterialKind, MaterialLibrary};
    use crate::units::{omega_from_wavelength_nm, MM, UM};

    fn setup() -> (FrequencyGrid, PumpPulse, Material) {
        let lib = MaterialLibrary::bundled();
        let bbo = lib.get(MaterialKind::Bbo).unwrap().clone();
        let grid = FrequencyGrid::from_wavelengths_nm(48, 1400.0, 1850.0).unwrap();
        (grid, PumpPulse::new(800.0, 1600.0).unwrap(), bbo)
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-15);
        assert!((sinc(1e-5) - 1.0).abs() < 1e-10);
        assert!((sinc(0.5) - 0.5f64.sin() / 0.5).abs() < 1e-16);
    }

    #[test]
    fn symmetric_and_normalized() {
        let (grid, pump, bbo) = setup();
        let theta = 20.0f64.to_radians();
        let jsa = JointSpectralAmplitude::build(grid, &pump, &bbo, 10.0 * MM, theta).unwrap();
        assert!(jsa.is_symmetric());
        assert!((jsa.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thin_crystal_limit_follows_pump() {
        let (grid, pump, bbo) = setup();
        let theta = 20.0f64.to_radians();
        let jsa = JointSpectralAmplitude::build(grid, &pump, &bbo, 1.0 * UM, theta).unwrap();
        // ratio to the pump envelope is a constant real number
        let (i0, j0) = (20, 27);
        let r0 = jsa.get(i0, j0) / pump.amplitude(grid.omega(i0) + grid.omega(j0));
        for (i, j) in [(19, 28), (20, 28), (21, 27), (22, 25)] {
            let p = pump.amplitude(grid.omega(i) + grid.omega(j));
            if p.norm() < 1e-6 {
                continue;
            }
            let r = jsa.get(i, j) / p;
            assert!((r - r0).norm() / r0.norm() < 1e-3, "{r} vs {r0}");
            assert!(r.arg().abs() < 1e-2);
        }
    }

    #[test]
    fn single_entry_matches_hand_evaluation() {
        // entry at (1500 nm, 1714 nm), L = 10 mm, theta = 19.9 deg, before
        // normalization: f_p · sinc(ΔkL/2) · exp(iΔkL/2) · Δω
        let lib = MaterialLibrary::bundled();
        let bbo = lib.get(MaterialKind::Bbo).unwrap();
        let wi = omega_from_wavelength_nm(1500.0);
        let ws = omega_from_wavelength_nm(1714.0);
        let g = FrequencyGrid::new(8, ws, wi).unwrap();
        let pump = PumpPulse::new(800.0, 1600.0).unwrap();
        let theta = 19.9f64.to_radians();
        let l = 10.0 * MM;
        // independent evaluation
        let lp = 1e-3 * crate::units::wavelength_nm_from_omega(wi + ws);
        let (no2, ne2) = (bbo.ordinary.n_squared(lp), bbo.extraordinary.n_squared(lp));
        let np = (theta.cos().powi(2) / no2 + theta.sin().powi(2) / ne2)
            .recip()
            .sqrt();
        let k = |n: f64, lum: f64| 2.0 * std::f64::consts::PI * n / (lum * 1e-6);
        let dk = k(np, lp)
            - k(bbo.ordinary.n_squared(1.5).sqrt(), 1.5)
            - k(bbo.ordinary.n_squared(1.714).sqrt(), 1.714);
        let x = 0.5 * dk * l;
        let sigma = 4.0 * std::f64::consts::LN_2 / 1.6e-12 / (2.0 * std::f64::consts::LN_2.sqrt());
        let dp = (wi + ws - omega_from_wavelength_nm(800.0)) / sigma;
        let expected = Complex64::from_polar((-0.5 * dp * dp).exp() * x.sin() / x, x);

        let f = |a: f64, b: f64| {
            let hp = 0.5 * pdc_mismatch(bbo, a, b, theta).unwrap() * l;
            pump.amplitude(a + b) * sinc(hp) * Complex64::from_polar(1.0, hp)
        };
        let got = f(g.omega(0), g.omega(7));
        assert!(
            (got - expected).norm() < 1e-6 * expected.norm().max(1e-30),
            "{got} vs {expected}"
        );
        // and build() applies the same formula up to the global scale
        let jsa = JointSpectralAmplitude::build(g, &pump, bbo, l, theta).unwrap();
        let raw = JointSpectralAmplitude::from_fn(g, f).unwrap();
        assert!((jsa.get(0, 7) - raw.get(0, 7)).norm() < 1e-14);
    }

    #[test]
    fn from_matrix_rejects_asymmetric_input() {
        let g = FrequencyGrid::new(8, 1.0, 2.0).unwrap();
        let mut m = Mat::<Complex64>::identity(8, 8);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            JointSpectralAmplitude::from_matrix(g, m),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn zero_matrix_is_rejected() {
        let g = FrequencyGrid::new(8, 1.0, 2.0).unwrap();
        assert!(JointSpectralAmplitude::from_fn(g, |_, _| Complex64::new(0.0, 0.0)).is_err());
    }
}
