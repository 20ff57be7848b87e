use std::f64::consts::FRAC_PI_2;

use super::{Material, Polarization};
use crate::units::FS2;
use crate::{Error, Result};

/// Orientation of a uniaxial crystal relative to the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalAxes {
    /// Optic-axis angle to the internal propagation direction, rad.
    pub theta: f64,
    /// External angle of incidence, rad.
    pub alpha: f64,
}

impl CrystalAxes {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "optic-axis angle {theta} rad outside [0, pi/2]"
            )));
        }
        if !(alpha.abs() < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "incidence angle {alpha} rad must be below pi/2 in magnitude"
            )));
        }
        Ok(Self { theta, alpha })
    }

    /// Crystal cut with the optic axis in the entrance facet and in the plane
    /// of incidence. At normal incidence the beam runs perpendicular to the
    /// axis; tilting by `alpha` rotates the internal ray towards it.
    pub fn facet_parallel(
        material: &Material,
        alpha: f64,
        reference_wavelength_um: f64,
    ) -> Result<Self> {
        let internal = refract_internal(material, alpha, reference_wavelength_um)?;
        Self::new(FRAC_PI_2 - internal.abs(), alpha)
    }
}

/// Snell refraction of the external angle `alpha` into the crystal using the
/// principal extraordinary index at `reference_wavelength_um`.
pub fn refract_internal(
    material: &Material,
    alpha: f64,
    reference_wavelength_um: f64,
) -> Result<f64> {
    let n = material.principal_extraordinary(reference_wavelength_um)?;
    Ok((alpha.sin() / n).asin())
}

/// Type-I PDC phase mismatch `k_p(ω_i+ω_s) − k_s(ω_s) − k_i(ω_i)` in 1/m, with an
/// extraordinary pump at `theta` and ordinary signal and idler.
pub fn pdc_mismatch(crystal: &Material, omega_i: f64, omega_s: f64, theta: f64) -> Result<f64> {
    let kp = crystal.wavenumber(Polarization::Extraordinary, omega_i + omega_s, theta)?;
    let ki = crystal.wavenumber(Polarization::Ordinary, omega_i, theta)?;
    let ks = crystal.wavenumber(Polarization::Ordinary, omega_s, theta)?;
    Ok(kp - (ki + ks))
}

/// Optic-axis angle at which type-I PDC `ω_p → ω_i + ω_s` is phase matched,
/// found by bisection on `[0, π/2]`.
pub fn phase_matching_angle(crystal: &Material, omega_i: f64, omega_s: f64) -> Result<f64> {
    let f = |t: f64| pdc_mismatch(crystal, omega_i, omega_s, t);
    let (mut a, mut b) = (0.0, FRAC_PI_2);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::ConvergenceFailure(format!(
            "{} cannot phase match this process at any angle",
            crystal.kind()
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// SFG wavevector mismatch `κ(Ω) − κ(ω) − κ(Ω−ω)` in 1/m for the ee→e
/// interaction along the internal ray described by `axes`.
pub fn sfg_mismatch(crystal: &Material, omega: f64, sum: f64, axes: &CrystalAxes) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if !(sum > omega) {
        return Err(Error::NonPositiveFrequency(sum - omega));
    }
    // Evaluate on the canonical pair (hi, sum - hi): for hi >= sum/2 the
    // subtraction is exact, so both members of a pair give identical bits.
    let hi = if omega >= 0.5 * sum {
        omega
    } else {
        sum - omega
    };
    let lo = sum - hi;
    let k = |w| crystal.wavenumber(Polarization::Extraordinary, w, axes.theta);
    Ok(k(sum)? - (k(hi)? + k(lo)?))
}

/// Quadratic spectral phase `½·GDD·(ω−ω₀)²` in rad, GDD in fs².
pub fn chirp_phase(omega: f64, gdd_fs2: f64, omega0: f64) -> f64 {
    let d = omega - omega0;
    0.5 * gdd_fs2 * FS2 * d * d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{MaterialKind, MaterialLibrary};
    use crate::units::omega_from_wavelength_nm;
    use proptest::prelude::*;

    fn lib() -> MaterialLibrary {
        MaterialLibrary::bundled()
    }

    fn wavenumber_oracle(s: &super::super::Sellmeier, lambda_um: f64) -> f64 {
        // independent: k = 2π n / λ
        2.0 * std::f64::consts::PI * s.n_squared(lambda_um).sqrt() / (lambda_um * 1e-6)
    }

    #[test]
    fn degenerate_type_one_phase_matching_crosses_zero_near_twenty_degrees() {
        let lib = lib();
        let bbo = lib.get(MaterialKind::Bbo).unwrap();
        let w0 = omega_from_wavelength_nm(1600.0);
        let at = |deg: f64| pdc_mismatch(bbo, w0, w0, deg.to_radians()).unwrap();
        assert!(
            at(19.0) * at(21.0) < 0.0,
            "no sign change between 19 and 21 deg"
        );
        // bisection for the crossing
        let (mut a, mut b) = (19.0, 21.0);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if at(a) * at(m) <= 0.0 {
                b = m
            } else {
                a = m
            }
        }
        assert!((a - 20.037).abs() < 0.01, "crossing at {a} deg");
    }

    #[test]
    fn solved_angle_zeroes_the_mismatch() {
        let lib = lib();
        let bbo = lib.get(MaterialKind::Bbo).unwrap();
        let w0 = omega_from_wavelength_nm(1600.0);
        let t = phase_matching_angle(bbo, w0, w0).unwrap();
        assert!((t.to_degrees() - 20.037).abs() < 0.01);
        assert!(pdc_mismatch(bbo, w0, w0, t).unwrap().abs() < 1e-6);
    }

    #[test]
    fn pdc_mismatch_detuned_pair_matches_hand_evaluation() {
        let lib = lib();
        let bbo = lib.get(MaterialKind::Bbo).unwrap();
        let theta = 19.9f64.to_radians();
        let wi = omega_from_wavelength_nm(1500.0);
        let ws = omega_from_wavelength_nm(1714.0);
        let lp = 1e-3 * crate::units::wavelength_nm_from_omega(wi + ws);
        let (no2, ne2) = (bbo.ordinary.n_squared(lp), bbo.extraordinary.n_squared(lp));
        let np = (theta.cos().powi(2) / no2 + theta.sin().powi(2) / ne2)
            .recip()
            .sqrt();
        let kp = 2.0 * std::f64::consts::PI * np / (lp * 1e-6);
        let expected =
            kp - wavenumber_oracle(&bbo.ordinary, 1.5) - wavenumber_oracle(&bbo.ordinary, 1.714);
        let got = pdc_mismatch(bbo, wi, ws, theta).unwrap();
        assert!((got - expected).abs() < 1e-6 * kp, "{got} vs {expected}");
    }

    #[test]
    fn sfg_mismatch_at_degeneracy_is_definition_and_nonzero() {
        let lib = lib();
        let ln = lib.get(MaterialKind::LiNbO3Mgo).unwrap();
        let axes = CrystalAxes::facet_parallel(ln, 0.0, 1.6).unwrap();
        let sum = omega_from_wavelength_nm(800.0);
        let got = sfg_mismatch(ln, 0.5 * sum, sum, &axes).unwrap();
        let expected = wavenumber_oracle(&ln.extraordinary, 0.8)
            - 2.0 * wavenumber_oracle(&ln.extraordinary, 1.6);
        assert!((got - expected).abs() < 1e-6 * expected.abs());
        // non-phase-matched: coherence length of order 10 um
        assert!(got > 1e5, "{got}");
    }

    #[test]
    fn sfg_mismatch_off_degeneracy_matches_hand_evaluation() {
        let lib = lib();
        let ln = lib.get(MaterialKind::LiNbO3Mgo).unwrap();
        let axes = CrystalAxes::facet_parallel(ln, 0.0, 1.6).unwrap();
        let sum = omega_from_wavelength_nm(800.0);
        let w = omega_from_wavelength_nm(1500.0);
        let partner_um = 1e-3 * crate::units::wavelength_nm_from_omega(sum - w);
        let expected = wavenumber_oracle(&ln.extraordinary, 0.8)
            - wavenumber_oracle(&ln.extraordinary, 1.5)
            - wavenumber_oracle(&ln.extraordinary, partner_um);
        let got = sfg_mismatch(ln, w, sum, &axes).unwrap();
        assert!(
            (got - expected).abs() < 1e-6 * expected.abs(),
            "{got} vs {expected}"
        );
    }

    #[test]
    fn sfg_mismatch_rejects_bad_frequencies() {
        let lib = lib();
        let ln = lib.get(MaterialKind::LiNbO3Mgo).unwrap();
        let axes = CrystalAxes::new(FRAC_PI_2, 0.0).unwrap();
        assert!(matches!(
            sfg_mismatch(ln, -1.0, 1e15, &axes),
            Err(Error::NonPositiveFrequency(_))
        ));
        assert!(sfg_mismatch(ln, 2e15, 1e15, &axes).is_err());
    }

    #[test]
    fn chirp_examples() {
        let w0 = 2.0e15;
        assert_eq!(chirp_phase(1.9e15, 0.0, w0), 0.0);
        assert_eq!(chirp_phase(w0, 200.0, w0), 0.0);
        // 200 fs^2, detuning 0.1 rad/fs
        assert!((chirp_phase(w0 + 1e14, 200.0, w0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axes_validation() {
        assert!(CrystalAxes::new(-0.1, 0.0).is_err());
        assert!(CrystalAxes::new(1.6, 0.0).is_err());
        let lib = lib();
        let ln = lib.get(MaterialKind::LiNbO3Mgo).unwrap();
        let tilted = CrystalAxes::facet_parallel(ln, 10f64.to_radians(), 1.6).unwrap();
        let internal = FRAC_PI_2 - tilted.theta;
        // Snell with n ~ 2.13
        assert!((internal.sin() * 2.13 - 10f64.to_radians().sin()).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn pdc_mismatch_symmetric(li in 1300.0f64..2000.0, ls in 1300.0f64..2000.0, th in 0.2f64..0.5) {
            let lib = lib();
            let bbo = lib.get(MaterialKind::Bbo).unwrap();
            let (wi, ws) = (omega_from_wavelength_nm(li), omega_from_wavelength_nm(ls));
            prop_assert_eq!(pdc_mismatch(bbo, wi, ws, th).unwrap(), pdc_mismatch(bbo, ws, wi, th).unwrap());
        }

        #[test]
        fn sfg_mismatch_symmetric(l in 1300.0f64..2000.0, lsum in 700.0f64..900.0, alpha in -0.2f64..0.2) {
            let lib = lib();
            let ln = lib.get(MaterialKind::LiNbO3Mgo).unwrap();
            let axes = CrystalAxes::facet_parallel(ln, alpha, 1.6).unwrap();
            let w = omega_from_wavelength_nm(l);
            let sum = omega_from_wavelength_nm(lsum);
            prop_assume!(sum > w && crate::units::wavelength_um_from_omega(sum - w) < 4.0);
            let a = sfg_mismatch(ln, w, sum, &axes).unwrap();
            let b = sfg_mismatch(ln, sum - w, sum, &axes).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn chirp_even_in_detuning(k in -300_000_000i64..300_000_000, gdd in -500.0f64..500.0) {
            // integer rad/s values keep w0 ± d exact
            let w0 = 1.2e15;
            let d = k as f64 * 1e6;
            prop_assert_eq!(chirp_phase(w0 + d, gdd, w0), chirp_phase(w0 - d, gdd, w0));
        }
    }
}
