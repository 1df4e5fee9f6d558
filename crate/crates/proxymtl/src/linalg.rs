//! Small dense linear-algebra helpers shared across modules.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eigh, SVD, UPLO};

use crate::error::{Error, Result};

/// Eigendecomposition of a symmetric matrix; eigenvalues ascending.
pub(crate) fn sym_eig(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    m.eigh(UPLO::Lower)
        .map_err(|e| Error::SvdFailure(format!("symmetric eigendecomposition: {e}")))
}

/// V · diag(w) · Vᵀ, re-symmetrized so the result is exactly symmetric.
pub(crate) fn reassemble_sym(eigvals: &Array1<f64>, eigvecs: &Array2<f64>) -> Array2<f64> {
    let scaled = eigvecs * eigvals; // broadcasts w over columns
    let m = scaled.dot(&eigvecs.t());
    symmetrize(&m.view())
}

/// (M + Mᵀ)/2.
pub(crate) fn symmetrize(m: &ArrayView2<f64>) -> Array2<f64> {
    let mut out = m.to_owned();
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[[i, j]] + m[[j, i]]);
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    out
}

pub(crate) fn frob_norm(m: &ArrayView2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn max_abs(m: &ArrayView2<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub(crate) fn all_finite(it: impl IntoIterator<Item = f64>) -> bool {
    it.into_iter().all(f64::is_finite)
}

const POWER_ITER_TOL: f64 = 1e-10;
const POWER_ITER_MAX: usize = 10_000;

/// Largest singular value of `m`.
///
/// Power iteration on MᵀM from the normalized all-ones vector, stopping when the
/// Rayleigh-quotient estimate of σ² is stable to a relative 1e-10; falls back to a
/// full SVD if 10_000 iterations do not converge.
pub(crate) fn top_singular_value(m: &ArrayView2<f64>) -> Result<f64> {
    let (p, q) = (m.nrows(), m.ncols());
    if p == 0 || q == 0 {
        return Ok(0.0);
    }
    let mut v = Array1::<f64>::from_elem(q, 1.0 / (q as f64).sqrt());
    let mut theta_prev = f64::NAN;
    for _ in 0..POWER_ITER_MAX {
        let w = m.dot(&v); // p
        let av = m.t().dot(&w); // MᵀM v
        let norm = av.dot(&av).sqrt();
        if norm == 0.0 {
            // v is in the null space of MᵀM; with the fixed start this means the
            // whole quadratic form vanishes along it. Treat a zero image as σ = 0.
            let theta = v.dot(&m.t().dot(&m.dot(&v)));
            return Ok(theta.max(0.0).sqrt());
        }
        let theta = v.dot(&av); // Rayleigh quotient for MᵀM, equals σ² at the fixed point
        v = av / norm;
        if theta_prev.is_finite() && (theta - theta_prev).abs() <= POWER_ITER_TOL * theta.abs() {
            return Ok(theta.max(0.0).sqrt());
        }
        theta_prev = theta;
    }
    // Slow spectral decay; let LAPACK settle it.
    let (_, s, _) = m
        .to_owned()
        .svd(false, false)
        .map_err(|e| Error::ConvergenceFailure(format!("power iteration stalled and SVD fallback failed: {e}")))?;
    Ok(s.iter().cloned().fold(0.0_f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn top_singular_value_of_diagonal() {
        let m = array![[5.0, 0.0], [0.0, 2.0]];
        assert!((top_singular_value(&m.view()).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn top_singular_value_of_zero_matrix() {
        let m = Array2::<f64>::zeros((3, 2));
        assert_eq!(top_singular_value(&m.view()).unwrap(), 0.0);
    }

    #[test]
    fn symmetrize_averages_off_diagonal() {
        let m = array![[1.0, 0.5], [0.3, 1.0]];
        let s = symmetrize(&m.view());
        assert_eq!(s[[0, 1]], 0.4);
        assert_eq!(s[[1, 0]], 0.4);
    }
}
