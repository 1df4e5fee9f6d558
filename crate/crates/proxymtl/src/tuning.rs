//! Regularization parameter selection.
//!
//! Two selectors over a fitted path: an adaptive pairwise-comparison rule that
//! needs no labelled data (it compares gradient maps between path points in the
//! dual norm), and a conventional hold-out error minimizer.

use ndarray::{Array1, Array2};

use crate::bundle::{CoefMatrix, PenaltySpec, TaskBundle};
use crate::error::{Error, Result};
use crate::objective::{dual_norm, gradient};
use crate::solver::FitResult;

/// Outcome of the adaptive selector.
#[derive(Clone, Debug)]
pub struct LepskiReport {
    pub chosen_lambda: f64,
    pub chosen_index: usize,
    /// Entry (i, j) is the dual norm of the gradient difference between path
    /// points i and j.
    pub pairwise_gaps: Array2<f64>,
    pub cbar: f64,
    /// Feasibility flag per grid index; always a suffix of the grid.
    pub feasible: Vec<bool>,
}

/// Geometric grid of `size` penalty levels ending at the smallest λ that forces
/// the zero solution (the dual norm of the gradient at zero) and starting at
/// `min_ratio` times that value.
pub fn default_grid(
    bundle: &TaskBundle,
    spec: PenaltySpec,
    size: usize,
    min_ratio: f64,
) -> Result<Vec<f64>> {
    if size == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(min_ratio > 0.0 && min_ratio <= 1.0) {
        return Err(Error::InvalidKind(format!(
            "grid min_ratio must lie in (0, 1], got {min_ratio}"
        )));
    }
    let zero = CoefMatrix::zeros(bundle.p(), bundle.num_tasks());
    let g0 = gradient(bundle, &zero)?;
    let lambda_max = dual_norm(g0.values(), spec)?;
    if lambda_max <= 0.0 {
        return Ok(vec![0.0]);
    }
    if size == 1 {
        return Ok(vec![lambda_max]);
    }
    let mut grid = Vec::with_capacity(size);
    for i in 0..size {
        let frac = (size - 1 - i) as f64 / (size - 1) as f64;
        grid.push(lambda_max * min_ratio.powf(frac));
    }
    Ok(grid)
}

/// Dual norms of gradient differences between all pairs of path points.
/// Symmetric with a zero diagonal.
pub fn pairwise_gap_matrix(
    bundle: &TaskBundle,
    path: &[FitResult],
) -> Result<Array2<f64>> {
    if path.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let spec = path_spec(path)?;
    let grads: Vec<CoefMatrix> = path
        .iter()
        .map(|r| gradient(bundle, &r.coef))
        .collect::<Result<_>>()?;
    let m = path.len();
    let mut gaps = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            let g = dual_norm(&(grads[i].values() - grads[j].values()), spec)?;
            gaps[[i, j]] = g;
            gaps[[j, i]] = g;
        }
    }
    Ok(gaps)
}

fn path_spec(path: &[FitResult]) -> Result<PenaltySpec> {
    let spec = path[0].spec;
    if path.iter().any(|r| r.spec != spec) {
        return Err(Error::InvalidKind("path mixes penalty kinds".into()));
    }
    Ok(spec)
}

fn path_lambdas(path: &[FitResult]) -> Result<Vec<f64>> {
    let lambdas: Vec<f64> = path.iter().map(|r| r.lambda).collect();
    for w in lambdas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidKind(format!(
                "path lambdas must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidKind("path lambdas must be finite and nonnegative".into()));
    }
    Ok(lambdas)
}

/// Adaptive selector: index j is feasible when every pair of path points at or
/// above j has gradient gap at most cbar·(λ_{j'} + λ_{j''}); the feasible set is
/// a suffix of the grid and the smallest feasible λ is returned.
pub fn lepski_select(
    bundle: &TaskBundle,
    path: &[FitResult],
    cbar: f64,
) -> Result<LepskiReport> {
    if path.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !(cbar > 0.0) || !cbar.is_finite() {
        return Err(Error::InvalidKind(format!("cbar must be positive and finite, got {cbar}")));
    }
    let lambdas = path_lambdas(path)?;
    let gaps = pairwise_gap_matrix(bundle, path)?;
    let m = path.len();
    let mut feasible = vec![false; m];
    let mut chosen = m - 1;
    // Scanning downward, index j only adds the pairs (j, j'') with j'' >= j to
    // those already certified for j + 1, so feasibility is checked incrementally
    // and stops at the first violation.
    for j in (0..m).rev() {
        let ok = (j..m).all(|jj| gaps[[j, jj]] <= cbar * (lambdas[j] + lambdas[jj]));
        if !ok {
            break;
        }
        feasible[j] = true;
        chosen = j;
    }
    Ok(LepskiReport {
        chosen_lambda: lambdas[chosen],
        chosen_index: chosen,
        pairwise_gaps: gaps,
        cbar,
        feasible,
    })
}

/// Hold-out selector: total squared prediction error over the hold-out sets,
/// minimized over the path; ties go to the larger λ. Returns the chosen index
/// and the per-point errors.
pub fn holdout_select(
    path: &[FitResult],
    holdout: &[(Array2<f64>, Array1<f64>)],
) -> Result<(usize, Vec<f64>)> {
    if path.is_empty() {
        return Err(Error::EmptyGrid);
    }
    path_lambdas(path)?;
    let q = path[0].coef.num_tasks();
    let p = path[0].coef.p();
    if holdout.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "{} hold-out sets for {q} tasks",
            holdout.len()
        )));
    }
    for (idx, (x, y)) in holdout.iter().enumerate() {
        if x.nrows() == 0 || x.nrows() != y.len() || x.ncols() != p {
            return Err(Error::DimensionMismatch(format!(
                "hold-out set {idx} has inconsistent shapes"
            )));
        }
    }
    let mut errors = Vec::with_capacity(path.len());
    for r in path {
        let mut total = 0.0;
        for (task, (x, y)) in holdout.iter().enumerate() {
            let resid = &x.dot(&r.coef.column(task).to_owned()) - y;
            total += resid.dot(&resid);
        }
        errors.push(total);
    }
    let mut best = 0;
    for (i, e) in errors.iter().enumerate() {
        if *e <= errors[best] {
            best = i;
        }
    }
    Ok((best, errors))
}
