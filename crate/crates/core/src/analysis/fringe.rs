use crate::sfg::SfgSpectrum;
use crate::{Error, Result};

/// Minimum `(max − min)/(max + min)` of a maximum against the higher of its
/// two flanking minima for it to count as a fringe.
pub const FRINGE_VISIBILITY: f64 = 0.2;

/// Three-point moving average; the end points average over two samples.
pub fn smooth3(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            y[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Mean wavelength spacing in nm between adjacent Maker-fringe maxima of the
/// total spectrum inside `band_nm`.
pub fn fringe_period(spectrum: &SfgSpectrum, band_nm: (f64, f64)) -> Result<f64> {
    let (lo, hi) = if band_nm.0 <= band_nm.1 {
        band_nm
    } else {
        (band_nm.1, band_nm.0)
    };
    let lambdas = spectrum.wavelengths_nm();
    let s = smooth3(spectrum.total());
    let n = s.len();
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(lambdas[i] >= lo && lambdas[i] <= hi) {
            continue;
        }
        if !(s[i] > s[i - 1] && s[i] >= s[i + 1]) {
            continue;
        }
        let mut l = i;
        while l > 0 && s[l - 1] <= s[l] {
            l -= 1;
        }
        let mut r = i;
        while r + 1 < n && s[r + 1] <= s[r] {
            r += 1;
        }
        let floor = s[l].max(s[r]);
        let vis = (s[i] - floor) / (s[i] + floor);
        if vis >= FRINGE_VISIBILITY {
            peaks.push(lambdas[i]);
        }
    }
    if peaks.len() < 3 {
        return Err(Error::TooFewFringes { found: peaks.len() });
    }
    let span = (peaks[peaks.len() - 1] - peaks[0]).abs();
    Ok(span / (peaks.len() - 1) as f64)
}
