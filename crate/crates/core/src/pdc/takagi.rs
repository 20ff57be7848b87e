//! Takagi factorization `F = U Σ Uᵀ` of a complex symmetric matrix.
//!
//! The factorization starts from an SVD `F = U Σ Vᴴ`. For a symmetric `F`,
//! each left singular vector of a simple singular value satisfies
//! `v̄ₖ = e^{iθₖ} uₖ`, so `wₖ = e^{iθₖ/2} uₖ` is a Takagi vector. Inside a
//! cluster of close singular values the SVD pairs are not reliable one by
//! one, so the cluster's projected block is factorized again on its own.

use faer::linalg::solvers::Svd;
use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use super::jsa::{max_abs, symmetry_defect};
use crate::{Error, Result};

/// Relative gap below which neighbouring singular values are treated as one
/// degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-3;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Takagi {
    /// Unitary matrix; columns are the Takagi vectors.
    pub u: Mat<Complex64>,
    /// Nonnegative, sorted in nonincreasing order.
    pub sigma: Vec<f64>,
}

impl Takagi {
    /// `‖F − U Σ Uᵀ‖_F / ‖F‖_F`.
    pub fn reconstruction_residual(&self, f: MatRef<'_, Complex64>) -> f64 {
        let n = self.u.nrows();
        let mut us = self.u.clone();
        for (k, &s) in self.sigma.iter().enumerate() {
            for i in 0..n {
                us[(i, k)] *= s;
            }
        }
        let rec = &us * self.u.transpose();
        let diff = f - &rec;
        diff.norm_l2() / f.norm_l2().max(f64::MIN_POSITIVE)
    }

    /// `max |UᴴU − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.u.adjoint() * &self.u;
        let mut d: f64 = 0.0;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let target = if i == j { 1.0 } else { 0.0 };
                d = d.max((g[(i, j)] - target).norm());
            }
        }
        d
    }
}

pub fn takagi_factorize(f: MatRef<'_, Complex64>) -> Result<Takagi> {
    let n = f.nrows();
    if f.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "Takagi factorization needs a square matrix, got {}x{}",
            n,
            f.ncols()
        )));
    }
    if n == 0 {
        return Ok(Takagi {
            u: Mat::zeros(0, 0),
            sigma: Vec::new(),
        });
    }
    let scale = max_abs(f);
    if !scale.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let defect = symmetry_defect(f);
    if defect > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { defect });
    }

    let svd = Svd::new(f).map_err(|e| Error::ConvergenceFailure(format!("SVD: {e:?}")))?;
    let sigma: Vec<f64> = (0..n).map(|k| svd.S()[k].re).collect();
    let su = svd.U();
    let sv = svd.V();
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::ConvergenceFailure(
            "SVD returned non-finite singular values".into(),
        ));
    }

    let top = sigma[0];
    // singular values this small carry no weight in F; their vectors are kept as-is
    let null_level = top * n as f64 * f64::EPSILON;
    let mut u = Mat::<Complex64>::zeros(n, n);
    let mut start = 0;
    while start < n {
        if sigma[start] <= null_level {
            for k in start..n {
                u.col_mut(k).copy_from(su.col(k));
            }
            break;
        }
        let mut end = start + 1;
        while end < n && sigma[end - 1] - sigma[end] <= DEGENERACY_GAP * sigma[end - 1] {
            end += 1;
        }
        if end - start == 1 {
            let k = start;
            let mut z = Complex64::new(0.0, 0.0);
            for i in 0..n {
                z += su[(i, k)].conj() * sv[(i, k)].conj();
            }
            let phase = Complex64::from_polar(1.0, 0.5 * z.arg());
            for i in 0..n {
                u[(i, k)] = su[(i, k)] * phase;
            }
        } else {
            resolve_cluster(f, su.subcols(start, end - start), &mut u, start)?;
        }
        start = end;
    }
    Ok(Takagi { u, sigma })
}

/// Takagi vectors for the cluster spanned by `uc`, written to columns
/// `start..` of `out`.
///
/// The projected block `B = U_cᴴ F Ū_c` is symmetric, and `B z̄ = s z` with
/// `z = x + iy` is the real symmetric eigenproblem `[[A, C], [C, −A]]·[x; y]
/// = s·[x; y]` for `B = A + iC`. Its positive half gives the block's Takagi
/// vectors; the `−s` partners are `iz`, so any orthonormal real basis of the
/// positive half is orthonormal as complex vectors too.
fn resolve_cluster(
    f: MatRef<'_, Complex64>,
    uc: MatRef<'_, Complex64>,
    out: &mut Mat<Complex64>,
    start: usize,
) -> Result<()> {
    let m = uc.ncols();
    let ubar = Mat::<Complex64>::from_fn(uc.nrows(), m, |i, j| uc[(i, j)].conj());
    let mut block = uc.adjoint() * f * &ubar;
    for b in 0..m {
        for a in 0..b {
            let v = (block[(a, b)] + block[(b, a)]) * 0.5;
            block[(a, b)] = v;
            block[(b, a)] = v;
        }
    }
    let embed = Mat::<f64>::from_fn(2 * m, 2 * m, |i, j| {
        let z = block[(i % m, j % m)];
        match (i < m, j < m) {
            (true, true) => z.re,
            (false, false) => -z.re,
            _ => z.im,
        }
    });
    let evd = embed
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::ConvergenceFailure(format!("cluster eigensolver: {e:?}")))?;
    // eigenvalues ascend, so the positive half is the last m columns
    let vecs = evd.U();
    let z = Mat::<Complex64>::from_fn(m, m, |a, k| {
        let col = 2 * m - 1 - k;
        Complex64::new(vecs[(a, col)], vecs[(m + a, col)])
    });
    out.subcols_mut(start, m).copy_from(uc * &z);
    Ok(())
}
