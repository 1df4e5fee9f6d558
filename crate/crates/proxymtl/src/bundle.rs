//! Core data model: per-task summary statistics, coefficient matrices, penalty and
//! solver configuration, and bundle validation.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg;

/// Summary statistics for one task: score vector s = XᵀY/n from the discovery sample
/// and reference covariance Σ̃ = X̃ᵀX̃/ñ from the proxy sample.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSummary {
    pub s: Array1<f64>,
    pub sigma: Array2<f64>,
    pub n_discovery: usize,
    pub n_proxy: usize,
    /// Number of proxy rows shared with the discovery sample, when known.
    pub overlap_count: Option<usize>,
}

/// A validated collection of task summaries sharing a common predictor dimension p.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskBundle {
    tasks: Vec<TaskSummary>,
    p: usize,
}

impl TaskBundle {
    /// Groups task summaries into a bundle, checking shapes only. Use
    /// [`validate_bundle`] for the full numeric checks (finiteness, symmetry, PSD).
    pub fn new(tasks: Vec<TaskSummary>) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::DimensionMismatch("bundle has no tasks".into()));
        }
        let p = tasks[0].s.len();
        if p == 0 {
            return Err(Error::DimensionMismatch("predictor dimension p must be >= 1".into()));
        }
        for (q, t) in tasks.iter().enumerate() {
            if t.s.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "task {q}: score length {} differs from bundle p = {p}",
                    t.s.len()
                )));
            }
            if t.sigma.nrows() != p || t.sigma.ncols() != p {
                return Err(Error::DimensionMismatch(format!(
                    "task {q}: sigma is {}x{}, expected {p}x{p}",
                    t.sigma.nrows(),
                    t.sigma.ncols()
                )));
            }
            if t.n_discovery == 0 || t.n_proxy == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "task {q}: sample sizes must be >= 1 (n = {}, n_tilde = {})",
                    t.n_discovery, t.n_proxy
                )));
            }
            if let Some(k) = t.overlap_count {
                if k > t.n_discovery.min(t.n_proxy) {
                    return Err(Error::DimensionMismatch(format!(
                        "task {q}: overlap_count {k} exceeds min(n, n_tilde) = {}",
                        t.n_discovery.min(t.n_proxy)
                    )));
                }
            }
        }
        Ok(TaskBundle { tasks, p })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn tasks(&self) -> &[TaskSummary] {
        &self.tasks
    }

    pub fn task(&self, q: usize) -> &TaskSummary {
        &self.tasks[q]
    }
}

/// Eigenvalues below this are a hard PSD violation.
const PSD_REJECT: f64 = -1e-8;

/// Relative trigger below which a covariance is rebuilt with clamped eigenvalues.
/// Anything between the trigger and zero is accepted as PSD-within-rounding, which
/// keeps validation idempotent (re-decomposing a clamped matrix can always surface
/// new eigenvalues at the -1e-16 scale).
const PSD_CLAMP_TRIGGER: f64 = 1e-12;

/// Validates a bundle numerically: rejects non-finite entries, symmetrizes each
/// sigma as (M + Mᵀ)/2, rejects eigenvalues below -1e-8, and clamps small negative
/// eigenvalues to zero. Idempotent: validating a validated bundle is a no-op.
pub fn validate_bundle(bundle: TaskBundle) -> Result<TaskBundle> {
    let p = bundle.p;
    let mut tasks = bundle.tasks;
    for (q, t) in tasks.iter_mut().enumerate() {
        if !linalg::all_finite(t.s.iter().cloned()) {
            return Err(Error::NonFinite(format!("task {q}: score vector")));
        }
        if !linalg::all_finite(t.sigma.iter().cloned()) {
            return Err(Error::NonFinite(format!("task {q}: sigma")));
        }
        let sym = linalg::symmetrize(&t.sigma.view());
        let (eigvals, eigvecs) = linalg::sym_eig(&sym)?;
        let min_eig = eigvals[0];
        if min_eig < PSD_REJECT {
            return Err(Error::NotPsd(min_eig));
        }
        let trigger = -PSD_CLAMP_TRIGGER * (1.0 + linalg::max_abs(&sym.view()));
        t.sigma = if min_eig < trigger {
            let clamped = eigvals.mapv(|v| v.max(0.0));
            linalg::reassemble_sym(&clamped, &eigvecs)
        } else {
            sym
        };
    }
    let _ = p;
    TaskBundle::new(tasks)
}

/// Coefficient matrix B (p predictors × Q tasks), finite by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefMatrix(Array2<f64>);

impl CoefMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if !linalg::all_finite(values.iter().cloned()) {
            return Err(Error::NonFinite("coefficient matrix".into()));
        }
        Ok(CoefMatrix(values))
    }

    pub fn zeros(p: usize, num_tasks: usize) -> Self {
        CoefMatrix(Array2::zeros((p, num_tasks)))
    }

    /// Wraps solver-internal iterates whose finiteness is tracked separately.
    pub(crate) fn from_raw(values: Array2<f64>) -> Self {
        CoefMatrix(values)
    }

    pub fn p(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_tasks(&self) -> usize {
        self.0.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_values(self) -> Array2<f64> {
        self.0
    }

    pub fn column(&self, q: usize) -> ArrayView1<'_, f64> {
        self.0.column(q)
    }

    /// Frobenius norm of the difference with another coefficient matrix.
    pub fn distance(&self, other: &CoefMatrix) -> f64 {
        let d = &self.0 - &other.0;
        linalg::frob_norm(&d.view())
    }
}

/// Penalty choice; each penalty carries its fixed dual norm (row-wise max ℓ2 for the
/// group penalty, operator norm for the nuclear penalty).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PenaltySpec {
    /// Row-group ℓ2,1: sum over rows of the row ℓ2 norm.
    GroupSparse,
    /// Nuclear norm: sum of singular values.
    LowRank,
}

impl PenaltySpec {
    pub fn label(self) -> &'static str {
        match self {
            PenaltySpec::GroupSparse => "sparse",
            PenaltySpec::LowRank => "lowrank",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSize {
    /// 1/L with L = max_q ‖Σ̃⁽q⁾‖_op computed from the bundle.
    Auto,
    Fixed(f64),
}

/// Proximal gradient solver settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub step_size: StepSize,
    pub max_iters: usize,
    /// Relative objective-change tolerance; convergence additionally requires the
    /// fixed-point gap to fall below 10·tol.
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { step_size: StepSize::Auto, max_iters: 50_000, tol: 1e-8 }
    }
}

impl FitConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidKind(format!("tol must be positive and finite, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidKind("max_iters must be >= 1".into()));
        }
        if let StepSize::Fixed(s) = self.step_size {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidKind(format!("step size must be positive and finite, got {s}")));
            }
        }
        Ok(())
    }
}
