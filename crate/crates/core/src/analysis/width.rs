use serde::{Deserialize, Serialize};

use crate::sfg::SfgSpectrum;
use crate::{Error, Result};

/// Full width at half maximum of `samples` along `axis`.
///
/// The width spans the outermost half-maximum crossings of the whole
/// window, each located by linear interpolation, so two separated peaks of
/// equal height give the distance across both. Fails with
/// [`Error::NoCrossing`] when the signal is at or above half maximum at
/// either end of the window.
pub fn fwhm(samples: &[f64], axis: &[f64]) -> Result<f64> {
    if samples.len() != axis.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples but {} axis points",
            samples.len(),
            axis.len()
        )));
    }
    if samples.len() < 3 {
        return Err(Error::NoCrossing);
    }
    let increasing = axis.windows(2).all(|w| w[1] > w[0]);
    let decreasing = axis.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidArgument(
            "axis must be strictly monotone".into(),
        ));
    }
    let peak = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::NoCrossing);
    }
    let half = 0.5 * peak;
    let last = samples.len() - 1;
    if samples[0] >= half || samples[last] >= half {
        return Err(Error::NoCrossing);
    }
    let first_above = samples
        .iter()
        .position(|&s| s >= half)
        .expect("peak exists");
    let last_above = samples
        .iter()
        .rposition(|&s| s >= half)
        .expect("peak exists");
    let cross = |a: usize, b: usize| {
        let t = (half - samples[a]) / (samples[b] - samples[a]);
        axis[a] + t * (axis[b] - axis[a])
    };
    let left = cross(first_above - 1, first_above);
    let right = cross(last_above + 1, last_above);
    Ok((right - left).abs())
}

/// Widths of the coherent and incoherent SFG components and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub fwhm_coherent_rad_s: f64,
    pub fwhm_incoherent_rad_s: f64,
    pub fwhm_coherent_nm: f64,
    pub fwhm_incoherent_nm: f64,
    /// `R = Δω_incoherent / Δω_coherent`.
    pub ratio: f64,
}

pub fn width_ratio(spectrum: &SfgSpectrum) -> Result<WidthReport> {
    if spectrum.coherent().iter().all(|&x| x == 0.0) {
        return Err(Error::ComponentEmpty("coherent"));
    }
    if spectrum.incoherent().iter().all(|&x| x == 0.0) {
        return Err(Error::ComponentEmpty("incoherent"));
    }
    let omegas = spectrum.omegas();
    let lambdas = spectrum.wavelengths_nm();
    let coh = fwhm(spectrum.coherent(), &omegas)?;
    let inc = fwhm(spectrum.incoherent(), &omegas)?;
    Ok(WidthReport {
        fwhm_coherent_rad_s: coh,
        fwhm_incoherent_rad_s: inc,
        fwhm_coherent_nm: fwhm(spectrum.coherent(), &lambdas)?,
        fwhm_incoherent_nm: fwhm(spectrum.incoherent(), &lambdas)?,
        ratio: inc / coh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdc::FrequencyGrid;
    use crate::sfg::SumGrid;
    use proptest::prelude::*;

    fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn rectangle() {
        let x = axis(201, 0.0, 10.0);
        let y: Vec<f64> = x
            .iter()
            .map(|&v| if (3.0..=6.0).contains(&v) { 1.0 } else { 0.0 })
            .collect();
        let w = fwhm(&y, &x).unwrap();
        assert!((w - 3.0).abs() <= 0.05 + 1e-12, "{w}");
    }

    #[test]
    fn gaussian() {
        let x = axis(512, -10.0, 10.0);
        let sigma = 1.3;
        let y: Vec<f64> = x
            .iter()
            .map(|&v| (-v * v / (2.0 * sigma * sigma)).exp())
            .collect();
        let w = fwhm(&y, &x).unwrap();
        let exact = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
        assert!((w / exact - 1.0).abs() < 5e-3);
        // decreasing axis gives the same width
        let xr: Vec<f64> = x.iter().rev().cloned().collect();
        let yr: Vec<f64> = y.iter().rev().cloned().collect();
        assert!((fwhm(&yr, &xr).unwrap() - w).abs() < 1e-12);
    }

    #[test]
    fn bimodal_spans_outermost_crossings() {
        let x = axis(1001, -10.0, 10.0);
        let bump = |v: f64, c: f64| (-(v - c) * (v - c) / 0.5).exp();
        let y: Vec<f64> = x.iter().map(|&v| bump(v, -4.0) + bump(v, 4.0)).collect();
        let w = fwhm(&y, &x).unwrap();
        let half_width = (0.5 * 2f64.ln()).sqrt();
        assert!((w - (8.0 + 2.0 * half_width)).abs() < 0.03, "{w}");
    }

    #[test]
    fn no_crossing_when_signal_stays_high() {
        let x = axis(50, 0.0, 1.0);
        assert!(matches!(fwhm(&vec![1.0; 50], &x), Err(Error::NoCrossing)));
        let ramp: Vec<f64> = x.iter().map(|v| v + 0.1).collect();
        assert!(matches!(fwhm(&ramp, &x), Err(Error::NoCrossing)));
        assert!(matches!(fwhm(&vec![0.0; 50], &x), Err(Error::NoCrossing)));
    }

    #[test]
    fn empty_component() {
        let g = FrequencyGrid::new(8, 1.0, 2.0).unwrap();
        let s = SfgSpectrum::from_parts(SumGrid::full(g), vec![0.0; 15], vec![1.0; 15]).unwrap();
        assert!(matches!(
            width_ratio(&s),
            Err(Error::ComponentEmpty("coherent"))
        ));
    }

    #[test]
    fn ratio_of_gaussians() {
        let g = FrequencyGrid::new(200, 1.0e15, 1.4e15).unwrap();
        let sg = SumGrid::full(g);
        let c0 = 2.4e15;
        let gauss = |w: f64, s: f64| (-(w - c0) * (w - c0) / (2.0 * s * s)).exp();
        let coh: Vec<f64> = sg.omegas().iter().map(|&w| gauss(w, 4e12)).collect();
        let inc: Vec<f64> = sg.omegas().iter().map(|&w| 3.0 * gauss(w, 6e13)).collect();
        let s = SfgSpectrum::from_parts(sg, coh, inc).unwrap();
        let r = width_ratio(&s).unwrap();
        assert!((r.ratio - 15.0).abs() < 0.15, "{}", r.ratio);
        assert!(r.fwhm_coherent_nm > 0.0 && r.fwhm_incoherent_nm > r.fwhm_coherent_nm);
    }

    proptest! {
        #[test]
        fn scale_invariant(c in 1e-6f64..1e6, s in 0.3f64..3.0) {
            let x = axis(301, -10.0, 10.0);
            let y: Vec<f64> = x.iter().map(|&v| (-v * v / (2.0 * s * s)).exp()).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * c).collect();
            let a = fwhm(&y, &x).unwrap();
            let b = fwhm(&ys, &x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn ratio_ignores_component_amplitudes(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            let g = FrequencyGrid::new(64, 1.0e15, 1.4e15).unwrap();
            let sg = SumGrid::full(g);
            let gauss = |w: f64, s: f64| (-(w - 2.4e15) * (w - 2.4e15) / (2.0 * s * s)).exp();
            let coh: Vec<f64> = sg.omegas().iter().map(|&w| gauss(w, 2e13)).collect();
            let inc: Vec<f64> = sg.omegas().iter().map(|&w| gauss(w, 9e13)).collect();
            let base = width_ratio(&SfgSpectrum::from_parts(sg.clone(), coh.clone(), inc.clone()).unwrap()).unwrap();
            let scaled = width_ratio(&SfgSpectrum::from_parts(
                sg,
                coh.iter().map(|v| v * a).collect(),
                inc.iter().map(|v| v * b).collect(),
            ).unwrap()).unwrap();
            prop_assert!((base.ratio - scaled.ratio).abs() <= 1e-9 * base.ratio);
        }
    }
}
