//! Summary-statistics loss, its gradient, and the penalty / dual norm pairs.
//!
//! The loss for coefficients B (p×Q) over a bundle is
//!   L(B) = Σ_q ½ (Be_q)ᵀ Σ̃⁽q⁾ (Be_q) − ⟨s⁽q⁾, Be_q⟩,
//! a quadratic expansion of per-task least squares in which only ŝ and Σ̃ appear.
//! It is convex whenever every Σ̃⁽q⁾ is PSD, with per-column gradient Σ̃⁽q⁾Be_q − s⁽q⁾.

use ndarray::{linalg::general_mat_vec_mul, Array2};

use crate::bundle::{CoefMatrix, PenaltySpec, TaskBundle};
use crate::error::{Error, Result};
use crate::linalg;

fn check_dims(bundle: &TaskBundle, coef: &CoefMatrix) -> Result<()> {
    if coef.p() != bundle.p() || coef.num_tasks() != bundle.num_tasks() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient matrix is {}x{}, bundle expects {}x{}",
            coef.p(),
            coef.num_tasks(),
            bundle.p(),
            bundle.num_tasks()
        )));
    }
    Ok(())
}

/// Smooth part of the objective (no penalty term).
pub fn loss(bundle: &TaskBundle, coef: &CoefMatrix) -> Result<f64> {
    check_dims(bundle, coef)?;
    let b = coef.values();
    let mut total = 0.0;
    let mut w = ndarray::Array1::<f64>::zeros(bundle.p());
    for (q, t) in bundle.tasks().iter().enumerate() {
        let col = b.column(q);
        general_mat_vec_mul(1.0, &t.sigma, &col, 0.0, &mut w);
        total += 0.5 * col.dot(&w) - t.s.dot(&col);
    }
    Ok(total)
}

/// Gradient of the loss; column q is Σ̃⁽q⁾Be_q − s⁽q⁾.
pub fn gradient(bundle: &TaskBundle, coef: &CoefMatrix) -> Result<CoefMatrix> {
    check_dims(bundle, coef)?;
    let mut out = Array2::zeros((bundle.p(), bundle.num_tasks()));
    gradient_into(bundle, coef.values(), &mut out);
    Ok(CoefMatrix::from_raw(out))
}

/// Dimension-unchecked gradient into a preallocated buffer; the solver's hot path.
pub(crate) fn gradient_into(bundle: &TaskBundle, b: &Array2<f64>, out: &mut Array2<f64>) {
    for (q, t) in bundle.tasks().iter().enumerate() {
        let col = b.column(q);
        let mut out_col = out.column_mut(q);
        general_mat_vec_mul(1.0, &t.sigma, &col, 0.0, &mut out_col);
        out_col -= &t.s;
    }
}

/// Dimension-unchecked loss for solver-internal iterates.
pub(crate) fn loss_raw(bundle: &TaskBundle, b: &Array2<f64>, scratch: &mut ndarray::Array1<f64>) -> f64 {
    let mut total = 0.0;
    for (q, t) in bundle.tasks().iter().enumerate() {
        let col = b.column(q);
        general_mat_vec_mul(1.0, &t.sigma, &col, 0.0, scratch);
        total += 0.5 * col.dot(scratch) - t.s.dot(&col);
    }
    total
}

/// Penalty value: sum of row ℓ2 norms (GroupSparse) or sum of singular values
/// (LowRank, via the Gram eigenvalues of the smaller side).
pub fn penalty_norm(m: &Array2<f64>, spec: PenaltySpec) -> Result<f64> {
    match spec {
        PenaltySpec::GroupSparse => Ok(m.rows().into_iter().map(|r| r.dot(&r).sqrt()).sum()),
        PenaltySpec::LowRank => {
            let gram = if m.ncols() <= m.nrows() { m.t().dot(m) } else { m.dot(&m.t()) };
            let (eigvals, _) = linalg::sym_eig(&gram)?;
            Ok(eigvals.iter().map(|&v| v.max(0.0).sqrt()).sum())
        }
    }
}

/// Dual norm paired with each penalty: max row ℓ2 norm (GroupSparse) or the
/// operator norm (LowRank).
pub fn dual_norm(m: &Array2<f64>, spec: PenaltySpec) -> Result<f64> {
    match spec {
        PenaltySpec::GroupSparse => {
            Ok(m.rows().into_iter().map(|r| r.dot(&r).sqrt()).fold(0.0_f64, f64::max))
        }
        PenaltySpec::LowRank => linalg::top_singular_value(&m.view()),
    }
}
