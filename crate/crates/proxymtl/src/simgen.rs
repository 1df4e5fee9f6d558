//! Synthetic data generation for the estimator's data-generating processes:
//! shared-support sparse or low-rank coefficient matrices, Gaussian designs with a
//! possibly shifted proxy covariance, controlled row overlap between discovery and
//! proxy samples, and the derived population quantities (noise inflation factor γ,
//! misspecification matrix Ξ).
//!
//! All randomness flows through named substreams keyed by (seed, purpose, rep,
//! task), so any piece of a scenario can be regenerated independently and sweeps
//! that vary one knob (τ, ρ̃, hold-out size) reuse the same underlying draws.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bundle::{CoefMatrix, TaskBundle, TaskSummary};
use crate::error::{Error, Result};
use crate::linalg;

/// Shape of the true coefficient matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefKind {
    /// s rows (shared across tasks, chosen uniformly) filled with N(0,1) entries.
    SparseRows(usize),
    /// U·Vᵀ/√r with U (p×r), V (Q×r) standard normal.
    LowRank(usize),
}

/// Population covariance descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CovSpec {
    Identity,
    /// AR(1) correlation φ^|i−j|, |φ| < 1.
    Ar1(f64),
    /// A PSD matrix at the given Frobenius distance (within 1%) from the discovery
    /// covariance; only meaningful for the proxy side.
    ShiftedFrobenius(f64),
}

/// Complete description of one simulated data-generating process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub p: usize,
    pub num_tasks: usize,
    /// Discovery sample size per task.
    pub n: usize,
    /// Proxy sample size per task.
    pub n_tilde: usize,
    /// Fraction of proxy rows copied from the discovery sample (⌊rho·ñ⌋ rows).
    pub rho: f64,
    pub coef: CoefKind,
    pub sigma1: CovSpec,
    pub sigma2: CovSpec,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            p: 100,
            num_tasks: 8,
            n: 100,
            n_tilde: 100,
            rho: 0.0,
            coef: CoefKind::SparseRows(10),
            sigma1: CovSpec::Identity,
            sigma2: CovSpec::Identity,
            noise_sd: 1.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    fn validate(&self) -> Result<()> {
        if self.p == 0 || self.num_tasks == 0 || self.n == 0 || self.n_tilde == 0 {
            return Err(Error::InvalidKind("p, num_tasks, n, n_tilde must all be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidKind(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if overlap_rows(self.rho, self.n_tilde) > self.n {
            return Err(Error::InvalidKind(format!(
                "overlap floor(rho*n_tilde) = {} exceeds discovery size n = {}",
                overlap_rows(self.rho, self.n_tilde),
                self.n
            )));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::InvalidKind(format!("noise_sd must be >= 0, got {}", self.noise_sd)));
        }
        match self.coef {
            CoefKind::SparseRows(s) if s > self.p => {
                return Err(Error::InvalidKind(format!("SparseRows({s}) exceeds p = {}", self.p)))
            }
            CoefKind::LowRank(r) if r > self.p.min(self.num_tasks) => {
                return Err(Error::InvalidKind(format!(
                    "LowRank({r}) exceeds min(p, num_tasks) = {}",
                    self.p.min(self.num_tasks)
                )))
            }
            _ => {}
        }
        if let CovSpec::Ar1(phi) = self.sigma1 {
            if !(phi.abs() < 1.0) {
                return Err(Error::InvalidKind(format!("AR(1) parameter must satisfy |phi| < 1, got {phi}")));
            }
        }
        if let CovSpec::Ar1(phi) = self.sigma2 {
            if !(phi.abs() < 1.0) {
                return Err(Error::InvalidKind(format!("AR(1) parameter must satisfy |phi| < 1, got {phi}")));
            }
        }
        if matches!(self.sigma1, CovSpec::ShiftedFrobenius(_)) {
            return Err(Error::InvalidKind(
                "sigma1 cannot be ShiftedFrobenius; the shift is defined relative to sigma1".into(),
            ));
        }
        if self.rho > 0.0 && self.sigma1 != self.sigma2 {
            return Err(Error::OverlapWithShift);
        }
        Ok(())
    }
}

fn overlap_rows(rho: f64, n_tilde: usize) -> usize {
    (rho * n_tilde as f64).floor() as usize
}

/// Population quantities implied by a scenario and a coefficient draw.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub coef: CoefMatrix,
    pub sigma1: Array2<f64>,
    pub sigma2: Array2<f64>,
    /// max_q of the per-task noise inflation factor γ_q.
    pub gamma: f64,
    /// Misspecification matrix; column q is (Σ₁ − Σ₂)β⁽q⁾.
    pub xi: Array2<f64>,
}

/// How rows are sampled from a population covariance.
#[derive(Clone, Debug)]
enum CovRoot {
    Iid,
    Ar1(f64),
    /// Symmetric PSD square root of the covariance.
    Dense(Array2<f64>),
}

impl CovRoot {
    fn sample_rows(&self, n: usize, p: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let mut x = Array2::<f64>::zeros((n, p));
        match self {
            CovRoot::Iid => {
                for v in x.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
            }
            CovRoot::Ar1(phi) => {
                let c = (1.0 - phi * phi).sqrt();
                for mut row in x.rows_mut() {
                    row[0] = rng.sample(StandardNormal);
                    for j in 1..p {
                        let z: f64 = rng.sample(StandardNormal);
                        row[j] = phi * row[j - 1] + c * z;
                    }
                }
            }
            CovRoot::Dense(root) => {
                let mut z = Array1::<f64>::zeros(p);
                for mut row in x.rows_mut() {
                    for v in z.iter_mut() {
                        *v = rng.sample(StandardNormal);
                    }
                    row.assign(&root.dot(&z));
                }
            }
        }
        x
    }
}

/// A scenario with its population covariances materialized.
#[derive(Clone, Debug)]
pub struct Scenario {
    config: ScenarioConfig,
    sigma1: Array2<f64>,
    sigma2: Array2<f64>,
    root1: CovRoot,
    root2: CovRoot,
}

impl Scenario {
    pub fn build(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let p = config.p;
        let sigma1 = match config.sigma1 {
            CovSpec::Identity => Array2::eye(p),
            CovSpec::Ar1(phi) => ar1_matrix(p, phi),
            CovSpec::ShiftedFrobenius(_) => unreachable!("rejected by validate"),
        };
        let (sigma2, root2) = match config.sigma2 {
            CovSpec::Identity => (Array2::eye(p), CovRoot::Iid),
            CovSpec::Ar1(phi) => (ar1_matrix(p, phi), CovRoot::Ar1(phi)),
            CovSpec::ShiftedFrobenius(target) => {
                let mut rng = substream(config.seed, "cov2", 0, 0);
                let s2 = make_shifted_cov(&sigma1, target, &mut rng)?;
                let root = psd_sqrt(&s2)?;
                (s2, CovRoot::Dense(root))
            }
        };
        let root1 = match config.sigma1 {
            CovSpec::Identity => CovRoot::Iid,
            CovSpec::Ar1(phi) => CovRoot::Ar1(phi),
            CovSpec::ShiftedFrobenius(_) => unreachable!(),
        };
        Ok(Scenario { config, sigma1, sigma2, root1, root2 })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn sigma1(&self) -> &Array2<f64> {
        &self.sigma1
    }

    pub fn sigma2(&self) -> &Array2<f64> {
        &self.sigma2
    }

    /// Draws the coefficient matrix for one replication and derives γ and Ξ.
    pub fn ground_truth(&self, rep: u64) -> Result<GroundTruth> {
        let c = &self.config;
        let mut rng = substream(c.seed, "coef", rep, 0);
        let coef = gen_coef(c.p, c.num_tasks, c.coef, &mut rng)?;
        let gamma = (0..c.num_tasks)
            .map(|q| gamma_factor(c.n, c.n_tilde, c.rho, &coef.column(q).to_owned()))
            .fold(f64::NEG_INFINITY, f64::max);
        let xi = xi_matrix(
            std::slice::from_ref(&self.sigma1),
            std::slice::from_ref(&self.sigma2),
            &coef,
        )?;
        Ok(GroundTruth { coef, sigma1: self.sigma1.clone(), sigma2: self.sigma2.clone(), gamma, xi })
    }

    /// Generates (X, Y, X̃) for one task of one replication. The first
    /// ⌊rho·ñ⌋ proxy rows are copies of the leading discovery rows; the fresh
    /// proxy rows come from a stream that does not depend on rho or ñ prefix
    /// length, so sweeps over those knobs stay coupled.
    pub fn gen_task_data(
        &self,
        truth: &GroundTruth,
        rep: u64,
        task: usize,
    ) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
        let c = &self.config;
        if task >= c.num_tasks {
            return Err(Error::DimensionMismatch(format!(
                "task index {task} out of range for {} tasks",
                c.num_tasks
            )));
        }
        let t = task as u64;
        let x = self.root1.sample_rows(c.n, c.p, &mut substream(c.seed, "x", rep, t));
        let y = respond(&x, &truth.coef.column(task).to_owned(), c.noise_sd, &mut substream(c.seed, "noise", rep, t));
        let mut x_tilde = self.root2.sample_rows(c.n_tilde, c.p, &mut substream(c.seed, "proxy", rep, t));
        let k = overlap_rows(c.rho, c.n_tilde);
        for i in 0..k {
            x_tilde.row_mut(i).assign(&x.row(i));
        }
        Ok((x, y, x_tilde))
    }

    /// Fresh labelled draws from the discovery distribution (hold-out or test data).
    pub fn gen_eval_data(
        &self,
        truth: &GroundTruth,
        rep: u64,
        task: usize,
        n_rows: usize,
        purpose: &str,
    ) -> Result<(Array2<f64>, Array1<f64>)> {
        let c = &self.config;
        if task >= c.num_tasks {
            return Err(Error::DimensionMismatch(format!(
                "task index {task} out of range for {} tasks",
                c.num_tasks
            )));
        }
        let mut rng = substream(c.seed, purpose, rep, task as u64);
        let x = self.root1.sample_rows(n_rows, c.p, &mut rng);
        let y = respond(&x, &truth.coef.column(task).to_owned(), c.noise_sd, &mut rng);
        Ok((x, y))
    }

    /// Summary-statistics bundle for one replication (all tasks).
    pub fn gen_bundle(&self, truth: &GroundTruth, rep: u64) -> Result<TaskBundle> {
        let mut tasks = Vec::with_capacity(self.config.num_tasks);
        for task in 0..self.config.num_tasks {
            let (x, y, x_tilde) = self.gen_task_data(truth, rep, task)?;
            tasks.push(summarize(&x, &y, &x_tilde)?);
        }
        TaskBundle::new(tasks)
    }
}

fn respond(x: &Array2<f64>, beta: &Array1<f64>, noise_sd: f64, rng: &mut ChaCha8Rng) -> Array1<f64> {
    let mut y = x.dot(beta);
    if noise_sd > 0.0 {
        for v in y.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += noise_sd * z;
        }
    }
    y
}

fn ar1_matrix(p: usize, phi: f64) -> Array2<f64> {
    Array2::from_shape_fn((p, p), |(i, j)| phi.powi((i as i32 - j as i32).abs()))
}

fn psd_sqrt(m: &Array2<f64>) -> Result<Array2<f64>> {
    let (eigvals, eigvecs) = linalg::sym_eig(m)?;
    let roots = eigvals.mapv(|v| v.max(0.0).sqrt());
    Ok(linalg::reassemble_sym(&roots, &eigvecs))
}

/// Draws a coefficient matrix of the requested shape.
pub fn gen_coef(p: usize, num_tasks: usize, kind: CoefKind, rng: &mut ChaCha8Rng) -> Result<CoefMatrix> {
    match kind {
        CoefKind::SparseRows(s) => {
            if s > p {
                return Err(Error::InvalidKind(format!("SparseRows({s}) exceeds p = {p}")));
            }
            let mut rows: Vec<usize> = rand::seq::index::sample(rng, p, s).into_vec();
            rows.sort_unstable();
            let mut b = Array2::<f64>::zeros((p, num_tasks));
            for &i in &rows {
                for j in 0..num_tasks {
                    b[[i, j]] = rng.sample(StandardNormal);
                }
            }
            Ok(CoefMatrix::new(b)?)
        }
        CoefKind::LowRank(r) => {
            if r > p.min(num_tasks) {
                return Err(Error::InvalidKind(format!(
                    "LowRank({r}) exceeds min(p, num_tasks) = {}",
                    p.min(num_tasks)
                )));
            }
            if r == 0 {
                return Ok(CoefMatrix::zeros(p, num_tasks));
            }
            let u = Array2::from_shape_fn((p, r), |_| rng.sample::<f64, _>(StandardNormal));
            let v = Array2::from_shape_fn((num_tasks, r), |_| rng.sample::<f64, _>(StandardNormal));
            Ok(CoefMatrix::new(u.dot(&v.t()) / (r as f64).sqrt())?)
        }
    }
}

/// Reduces raw task data to its summary statistics: s = XᵀY/n, Σ̃ = X̃ᵀX̃/ñ, with
/// the overlap count recovered by exact row identity.
pub fn summarize(x: &Array2<f64>, y: &Array1<f64>, x_tilde: &Array2<f64>) -> Result<TaskSummary> {
    let (n, p) = (x.nrows(), x.ncols());
    let n_tilde = x_tilde.nrows();
    if n == 0 || n_tilde == 0 || p == 0 {
        return Err(Error::DimensionMismatch("summarize requires nonempty X, X_tilde".into()));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("Y has length {}, X has {n} rows", y.len())));
    }
    if x_tilde.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "X_tilde has {} columns, X has {p}",
            x_tilde.ncols()
        )));
    }
    let s = x.t().dot(y) / n as f64;
    let sigma = x_tilde.t().dot(x_tilde) / n_tilde as f64;
    let overlap = count_shared_rows(x, x_tilde);
    Ok(TaskSummary {
        s,
        sigma,
        n_discovery: n,
        n_proxy: n_tilde,
        overlap_count: Some(overlap),
    })
}

fn row_hash(row: ndarray::ArrayView1<f64>) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for v in row.iter() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Number of `x_tilde` rows bitwise-identical to some row of `x`.
fn count_shared_rows(x: &Array2<f64>, x_tilde: &Array2<f64>) -> usize {
    let mut table: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, row) in x.rows().into_iter().enumerate() {
        table.entry(row_hash(row)).or_default().push(i);
    }
    let mut count = 0;
    for row in x_tilde.rows() {
        if let Some(candidates) = table.get(&row_hash(row)) {
            if candidates.iter().any(|&i| x.row(i) == row) {
                count += 1;
            }
        }
    }
    count
}

/// Per-task noise inflation factor 1 + ‖β‖²·(n/ñ + 1 − 2ρ̃).
pub fn gamma_factor(n: usize, n_tilde: usize, rho: f64, beta: &Array1<f64>) -> f64 {
    let b2 = beta.dot(beta);
    1.0 + b2 * (n as f64 / n_tilde as f64 + 1.0 - 2.0 * rho)
}

/// Misspecification matrix: column q is (Σ₁⁽q⁾ − Σ₂⁽q⁾)β⁽q⁾. Pass length-1
/// slices to share one covariance across all tasks.
pub fn xi_matrix(
    sigma1_list: &[Array2<f64>],
    sigma2_list: &[Array2<f64>],
    coef: &CoefMatrix,
) -> Result<Array2<f64>> {
    let q = coef.num_tasks();
    let p = coef.p();
    let pick = |list: &[Array2<f64>], q_idx: usize| -> Result<Array2<f64>> {
        let m = if list.len() == 1 { &list[0] } else { list.get(q_idx).ok_or_else(|| {
            Error::DimensionMismatch(format!("covariance list has {} entries for {q} tasks", list.len()))
        })? };
        if m.nrows() != p || m.ncols() != p {
            return Err(Error::DimensionMismatch(format!(
                "covariance {q_idx} is {}x{}, expected {p}x{p}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m.clone())
    };
    let mut xi = Array2::<f64>::zeros((p, q));
    for q_idx in 0..q {
        let s1 = pick(sigma1_list, q_idx)?;
        let s2 = pick(sigma2_list, q_idx)?;
        let diff = &s1 - &s2;
        let col = diff.dot(&coef.column(q_idx).to_owned());
        xi.column_mut(q_idx).assign(&col);
    }
    Ok(xi)
}

const SHIFT_REL_TOL: f64 = 0.01;
const SHIFT_MAX_ITERS: usize = 50;

/// A PSD matrix whose Frobenius distance from `sigma1` is `target` within 1%.
///
/// Adds a random symmetric direction, clamps to the PSD cone, and rescales the
/// pre-clamp step until the post-clamp distance matches the target.
pub fn make_shifted_cov(sigma1: &Array2<f64>, target: f64, rng: &mut ChaCha8Rng) -> Result<Array2<f64>> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(Error::InvalidKind(format!("target Frobenius distance must be >= 0, got {target}")));
    }
    if target == 0.0 {
        return Ok(sigma1.clone());
    }
    let p = sigma1.nrows();
    let raw = Array2::from_shape_fn((p, p), |_| rng.sample::<f64, _>(StandardNormal));
    let mut dir = linalg::symmetrize(&raw.view());
    let norm = linalg::frob_norm(&dir.view());
    if norm == 0.0 {
        return Err(Error::TargetUnreachable("degenerate zero direction".into()));
    }
    dir /= norm;

    let mut scale = target;
    for _ in 0..SHIFT_MAX_ITERS {
        let cand = sigma1 + &(scale * &dir);
        let (eigvals, eigvecs) = linalg::sym_eig(&cand)?;
        let clamped = eigvals.mapv(|v| v.max(0.0));
        let sigma2 = linalg::reassemble_sym(&clamped, &eigvecs);
        let dist = linalg::frob_norm(&(&sigma2 - sigma1).view());
        if (dist - target).abs() <= SHIFT_REL_TOL * target {
            return Ok(sigma2);
        }
        if dist <= 1e-12 * target {
            scale *= 2.0; // the step was swallowed by the PSD clamp; push harder
        } else {
            scale *= target / dist;
        }
    }
    Err(Error::TargetUnreachable(format!(
        "could not reach Frobenius distance {target} within {SHIFT_MAX_ITERS} rescalings"
    )))
}

/// Mean squared prediction error on held-out data, per task and averaged.
pub fn prediction_mse(coef: &CoefMatrix, test: &[(Array2<f64>, Array1<f64>)]) -> Result<(Vec<f64>, f64)> {
    if test.len() != coef.num_tasks() {
        return Err(Error::DimensionMismatch(format!(
            "{} test sets for {} tasks",
            test.len(),
            coef.num_tasks()
        )));
    }
    let mut per_task = Vec::with_capacity(test.len());
    for (q, (x, y)) in test.iter().enumerate() {
        if x.nrows() == 0 || x.nrows() != y.len() || x.ncols() != coef.p() {
            return Err(Error::DimensionMismatch(format!("test set {q} has inconsistent shapes")));
        }
        let pred = x.dot(&coef.column(q).to_owned());
        let mse = (&pred - y).mapv(|v| v * v).sum() / y.len() as f64;
        per_task.push(mse);
    }
    let mean = per_task.iter().sum::<f64>() / per_task.len() as f64;
    Ok((per_task, mean))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Independent deterministic RNG stream for (seed, purpose, rep, index).
pub(crate) fn substream(seed: u64, purpose: &str, rep: u64, index: u64) -> ChaCha8Rng {
    let mut s = splitmix64(seed ^ 0x51a5_f3c1_9ab3_37e9);
    s = splitmix64(s ^ label_hash(purpose));
    s = splitmix64(s ^ rep);
    s = splitmix64(s ^ index);
    ChaCha8Rng::seed_from_u64(s)
}
