//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::{Error, Result};

// nodes and weights as tabulated, more digits than f64 holds
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of equal panels the interval is split into before adapting.
    pub initial_panels: usize,
    /// Maximum number of panels after subdivision.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            initial_panels: 1,
            max_panels: 20_000,
        }
    }
}

/// Result of an integration: value and estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: Complex64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let value = k * h;
    let error = ((k - g) * h).norm();
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection of the panel
/// with the largest error estimate.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(
            "integration bounds must be finite".into(),
        ));
    }
    if a == b {
        return Ok(Quad {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 {
            b
        } else {
            a + width * (i + 1) as f64
        };
        heap.push(kronrod(&mut f, lo, hi));
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
                (v + p.value, e + p.error)
            });
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(Quad { value, error });
        }
        if heap.len() >= opts.max_panels.max(n0) {
            return Err(Error::QuadratureNotConverged {
                estimate: error,
                requested: target,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureNotConverged {
                estimate: error,
                requested: target,
            });
        }
        heap.push(kronrod(&mut f, worst.a, mid));
        heap.push(kronrod(&mut f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(rel: f64) -> QuadOptions {
        QuadOptions {
            rel_tol: rel,
            ..Default::default()
        }
    }

    #[test]
    fn polynomials_are_exact() {
        // Kronrod 15 integrates degree 22 exactly.
        let q = integrate(|x| Complex64::new(x.powi(10), 0.0), -1.0, 2.0, opts(1e-14)).unwrap();
        let exact = (2f64.powi(11) + 1.0) / 11.0;
        assert!((q.value.re - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn oscillatory_exponential() {
        let k = 300.0;
        let q = integrate(
            |x| Complex64::new(0.0, -k * x).exp(),
            0.0,
            1.0,
            QuadOptions {
                rel_tol: 1e-12,
                initial_panels: 64,
                ..Default::default()
            },
        )
        .unwrap();
        let exact =
            (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -k).exp()) / Complex64::new(0.0, k);
        assert!((q.value - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn lorentzian_peak() {
        let b = 1e-3;
        let q = integrate(
            |x| Complex64::new(1.0, 0.0) / (1.0 + Complex64::new(0.0, 2.0 * x / b)),
            -1.0,
            1.0,
            opts(1e-10),
        )
        .unwrap();
        // ∫ dx/(1+2ix/b) = (b/2i) ln((1+2i/b)/(1-2i/b)) = b·atan(2/b)
        let exact = b * (2.0 / b).atan();
        assert!((q.value.re - exact).abs() < 1e-9 * exact);
        assert!(q.value.im.abs() < 1e-9 * exact);
    }

    #[test]
    fn reports_failure() {
        let r = integrate(
            |x| Complex64::new(1.0 / x.abs().sqrt().max(1e-300), 0.0),
            -1.0,
            1.0,
            QuadOptions {
                rel_tol: 1e-15,
                max_panels: 10,
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
