//! Named experiment scenarios producing long-format CSV results.
//!
//! Each scenario sweeps one knob of the data-generating process and records
//! per-task test MSE for a fixed set of estimators. All draws flow through
//! substreams keyed by (seed, purpose, rep, task) and never by the sweep value,
//! so sweep points share their underlying data (common random numbers) and the
//! curves are smooth at modest replication counts.

use ndarray::{concatenate, s, Array1, Array2, Axis};
use ndarray_linalg::Solve;
use serde::{Deserialize, Serialize};

use crate::bundle::{CoefMatrix, FitConfig, PenaltySpec, StepSize, TaskBundle, TaskSummary};
use crate::error::{Error, Result};
use crate::simgen::{prediction_mse, summarize, CoefKind, CovSpec, GroundTruth, Scenario, ScenarioConfig};
use crate::solver::fit_path;
use crate::tuning::{default_grid, holdout_select, lepski_select};

/// Named experiment families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Proxy sample size ratio τ = ñ/n over {0.5, 1, 2, 5, 10}.
    TauSweep,
    /// Overlap fraction ρ̃ over {0, 0.25, 0.5, 0.75, 1}.
    RhoSweep,
    /// Proxy covariance shift ‖Σ₁ − Σ₂‖_F over {10, 20, 50, 100}.
    MisspecSweep,
    /// Adaptive tuning with pooled extra data vs hold-out tuning, over the
    /// hold-out sample size.
    TuningCompare,
    /// Multi-task fit vs pooled and per-task single-task baselines, over the
    /// number of tasks.
    SingleVsMulti,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::TauSweep,
        ScenarioKind::RhoSweep,
        ScenarioKind::MisspecSweep,
        ScenarioKind::TuningCompare,
        ScenarioKind::SingleVsMulti,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::TauSweep => "tau-sweep",
            ScenarioKind::RhoSweep => "rho-sweep",
            ScenarioKind::MisspecSweep => "misspec-sweep",
            ScenarioKind::TuningCompare => "tuning-compare",
            ScenarioKind::SingleVsMulti => "single-vs-multi",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::InvalidKind(format!("unknown scenario '{name}'")))
    }
}

/// Experiment settings. Every field has a default, so a partial JSON override
/// only needs to name what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub reps: usize,
    pub seed: u64,
    /// Penalty grid for every tuned fit.
    pub grid_size: usize,
    pub grid_min_ratio: f64,
    /// Grid floor for the tuning-method comparison. With cbar = 1 the pairwise
    /// selector accepts every index on a converged path (each gradient's dual
    /// norm is within its own lambda, so every pairwise gap clears the bound),
    /// which parks the adaptive arm at the bottom of the grid. The comparison
    /// therefore runs on a grid whose floor is a workable penalty level rather
    /// than the near-unpenalized floor the sweeps use for exploration.
    pub tuning_grid_min_ratio: f64,
    /// Solver settings for experiment fits (looser than the library default;
    /// tuned for sweep throughput).
    pub tol: f64,
    pub max_iters: usize,
    /// Fresh rows per task for test MSE and (where applicable) tuning data.
    pub n_test: usize,
    pub n_tune: usize,
    /// Adaptive selector constant.
    pub cbar: f64,
    pub tau_values: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub shift_values: Vec<f64>,
    pub holdout_sizes: Vec<usize>,
    pub task_counts: Vec<usize>,
    /// Optional overrides of the per-scenario default dimensions.
    pub p: Option<usize>,
    pub num_tasks: Option<usize>,
    pub n: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            reps: 20,
            seed: 20240817,
            grid_size: 10,
            grid_min_ratio: 0.01,
            tuning_grid_min_ratio: 0.1,
            tol: 1e-6,
            max_iters: 2000,
            n_test: 100,
            n_tune: 100,
            cbar: 1.0,
            tau_values: vec![0.5, 1.0, 2.0, 5.0, 10.0],
            rho_values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            shift_values: vec![10.0, 20.0, 50.0, 100.0],
            holdout_sizes: vec![10, 25, 50, 100],
            task_counts: vec![2, 4, 8],
            p: None,
            num_tasks: None,
            n: None,
        }
    }
}

impl ExperimentConfig {
    fn fit_config(&self) -> FitConfig {
        FitConfig { step_size: StepSize::Auto, max_iters: self.max_iters, tol: self.tol }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidKind("reps must be >= 1".into()));
        }
        if self.n_test == 0 || self.n_tune == 0 {
            return Err(Error::InvalidKind("n_test and n_tune must be >= 1".into()));
        }
        Ok(())
    }
}

/// One line of the long-format results CSV.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub scenario: &'static str,
    pub penalty: &'static str,
    pub rep: usize,
    pub sweep_param: f64,
    pub estimator: &'static str,
    pub task: usize,
    pub mse: f64,
}

/// Runs one scenario for one penalty and returns rows ordered by
/// (sweep value, rep, estimator, task) with no gaps.
pub fn run_experiment(
    kind: ScenarioKind,
    penalty: PenaltySpec,
    config: &ExperimentConfig,
) -> Result<Vec<ResultRow>> {
    config.validate()?;
    match kind {
        ScenarioKind::TauSweep => tau_sweep(penalty, config),
        ScenarioKind::RhoSweep => rho_sweep(penalty, config),
        ScenarioKind::MisspecSweep => misspec_sweep(penalty, config),
        ScenarioKind::TuningCompare => tuning_compare(penalty, config),
        ScenarioKind::SingleVsMulti => single_vs_multi(penalty, config),
    }
}

/// Serializes result rows as CSV (header row, LF endings).
pub fn write_results_csv<W: std::io::Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidKind(format!("CSV serialization: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn coef_kind(penalty: PenaltySpec, p: usize, num_tasks: usize) -> CoefKind {
    match penalty {
        PenaltySpec::GroupSparse => CoefKind::SparseRows(10.min(p)),
        PenaltySpec::LowRank => CoefKind::LowRank(2.min(p).min(num_tasks)),
    }
}

fn sweep_scenario_config(
    cfg: &ExperimentConfig,
    penalty: PenaltySpec,
    n_tilde: usize,
    rho: f64,
    sigma2: CovSpec,
) -> ScenarioConfig {
    let p = cfg.p.unwrap_or(100);
    let num_tasks = cfg.num_tasks.unwrap_or(8);
    let n = cfg.n.unwrap_or(100);
    ScenarioConfig {
        p,
        num_tasks,
        n,
        n_tilde,
        rho,
        coef: coef_kind(penalty, p, num_tasks),
        sigma1: CovSpec::Identity,
        sigma2,
        noise_sd: 1.0,
        seed: cfg.seed,
    }
}

fn eval_sets(
    sc: &Scenario,
    truth: &GroundTruth,
    rep: u64,
    n_rows: usize,
    purpose: &str,
) -> Result<Vec<(Array2<f64>, Array1<f64>)>> {
    (0..sc.config().num_tasks)
        .map(|q| sc.gen_eval_data(truth, rep, q, n_rows, purpose))
        .collect()
}

/// Fits a warm-started path on the bundle's own default grid, selects λ by
/// hold-out error, and returns per-task test MSE of the selected fit.
fn tuned_mse(
    bundle: &TaskBundle,
    penalty: PenaltySpec,
    cfg: &ExperimentConfig,
    tune: &[(Array2<f64>, Array1<f64>)],
    test: &[(Array2<f64>, Array1<f64>)],
) -> Result<Vec<f64>> {
    let grid = default_grid(bundle, penalty, cfg.grid_size, cfg.grid_min_ratio)?;
    let path = fit_path(bundle, penalty, &grid, &cfg.fit_config())?;
    let (idx, _) = holdout_select(&path, tune)?;
    let (per_task, _) = prediction_mse(&path[idx].coef, test)?;
    Ok(per_task)
}

fn push_rows(
    rows: &mut Vec<ResultRow>,
    scenario: &'static str,
    penalty: PenaltySpec,
    rep: usize,
    sweep_param: f64,
    estimator: &'static str,
    per_task: &[f64],
) {
    for (task, &mse) in per_task.iter().enumerate() {
        rows.push(ResultRow {
            scenario,
            penalty: penalty.label(),
            rep,
            sweep_param,
            estimator,
            task,
            mse,
        });
    }
}

/// Proxy, individual-level, and population-covariance bundles for one rep.
fn comparator_bundles(
    sc: &Scenario,
    truth: &GroundTruth,
    rep: u64,
) -> Result<(TaskBundle, TaskBundle, TaskBundle)> {
    let q = sc.config().num_tasks;
    let mut proxy = Vec::with_capacity(q);
    let mut individual = Vec::with_capacity(q);
    let mut true_cov = Vec::with_capacity(q);
    for task in 0..q {
        let (x, y, x_tilde) = sc.gen_task_data(truth, rep, task)?;
        let ps = summarize(&x, &y, &x_tilde)?;
        let is = summarize(&x, &y, &x)?;
        true_cov.push(TaskSummary {
            s: is.s.clone(),
            sigma: sc.sigma1().clone(),
            n_discovery: is.n_discovery,
            n_proxy: ps.n_proxy,
            overlap_count: None,
        });
        proxy.push(ps);
        individual.push(is);
    }
    Ok((TaskBundle::new(proxy)?, TaskBundle::new(individual)?, TaskBundle::new(true_cov)?))
}

fn tau_sweep(penalty: PenaltySpec, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &tau in &cfg.tau_values {
        if !(tau > 0.0) {
            return Err(Error::InvalidKind(format!("tau must be positive, got {tau}")));
        }
        let n = cfg.n.unwrap_or(100);
        let n_tilde = ((tau * n as f64).round() as usize).max(1);
        let sc_cfg = sweep_scenario_config(cfg, penalty, n_tilde, 0.0, CovSpec::Identity);
        let sc = Scenario::build(sc_cfg)?;
        run_comparator_reps(&sc, penalty, cfg, ScenarioKind::TauSweep.name(), tau, true, &mut rows)?;
    }
    Ok(rows)
}

fn rho_sweep(penalty: PenaltySpec, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &rho in &cfg.rho_values {
        let n = cfg.n.unwrap_or(100);
        let sc_cfg = sweep_scenario_config(cfg, penalty, n, rho, CovSpec::Identity);
        let sc = Scenario::build(sc_cfg)?;
        run_comparator_reps(&sc, penalty, cfg, ScenarioKind::RhoSweep.name(), rho, true, &mut rows)?;
    }
    Ok(rows)
}

fn misspec_sweep(penalty: PenaltySpec, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &shift in &cfg.shift_values {
        let n = cfg.n.unwrap_or(100);
        let n_tilde = n + n / 2;
        let sc_cfg =
            sweep_scenario_config(cfg, penalty, n_tilde, 0.0, CovSpec::ShiftedFrobenius(shift));
        let sc = Scenario::build(sc_cfg)?;
        run_comparator_reps(
            &sc,
            penalty,
            cfg,
            ScenarioKind::MisspecSweep.name(),
            shift,
            false,
            &mut rows,
        )?;
    }
    Ok(rows)
}

/// Shared replication loop for the three sweep scenarios: tunes and scores the
/// proxy and individual-level estimators, plus the population-covariance
/// comparator when requested.
fn run_comparator_reps(
    sc: &Scenario,
    penalty: PenaltySpec,
    cfg: &ExperimentConfig,
    scenario_name: &'static str,
    sweep_param: f64,
    with_true_cov: bool,
    rows: &mut Vec<ResultRow>,
) -> Result<()> {
    for rep in 0..cfg.reps {
        let truth = sc.ground_truth(rep as u64)?;
        let (proxy, individual, true_cov) = comparator_bundles(sc, &truth, rep as u64)?;
        let tune = eval_sets(sc, &truth, rep as u64, cfg.n_tune, "tune")?;
        let test = eval_sets(sc, &truth, rep as u64, cfg.n_test, "test")?;
        let mse = tuned_mse(&proxy, penalty, cfg, &tune, &test)?;
        push_rows(rows, scenario_name, penalty, rep, sweep_param, "proxy", &mse);
        let mse = tuned_mse(&individual, penalty, cfg, &tune, &test)?;
        push_rows(rows, scenario_name, penalty, rep, sweep_param, "individual", &mse);
        if with_true_cov {
            let mse = tuned_mse(&true_cov, penalty, cfg, &tune, &test)?;
            push_rows(rows, scenario_name, penalty, rep, sweep_param, "true_cov", &mse);
        }
    }
    Ok(())
}

fn tuning_compare(penalty: PenaltySpec, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let p = cfg.p.unwrap_or(50);
    let num_tasks = cfg.num_tasks.unwrap_or(4);
    let n = cfg.n.unwrap_or(100);
    let max_holdout = cfg.holdout_sizes.iter().copied().max().unwrap_or(0);
    if max_holdout == 0 {
        return Err(Error::InvalidKind("holdout_sizes must be nonempty and positive".into()));
    }
    let sc = Scenario::build(ScenarioConfig {
        p,
        num_tasks,
        n,
        n_tilde: n,
        rho: 0.0,
        coef: coef_kind(penalty, p, num_tasks),
        sigma1: CovSpec::Identity,
        sigma2: CovSpec::Identity,
        noise_sd: 1.0,
        seed: cfg.seed,
    })?;
    let name = ScenarioKind::TuningCompare.name();
    // Buckets keep the output ordered sweep-major even though each rep computes
    // all hold-out sizes at once (the base path is shared across sizes).
    let mut buckets: Vec<Vec<ResultRow>> = vec![Vec::new(); cfg.holdout_sizes.len()];
    for rep in 0..cfg.reps {
        let truth = sc.ground_truth(rep as u64)?;
        let mut base_tasks = Vec::with_capacity(num_tasks);
        let mut raw = Vec::with_capacity(num_tasks);
        for task in 0..num_tasks {
            let (x, y, x_tilde) = sc.gen_task_data(&truth, rep as u64, task)?;
            base_tasks.push(summarize(&x, &y, &x_tilde)?);
            raw.push((x, y, x_tilde));
        }
        let base = TaskBundle::new(base_tasks)?;
        // One nested pool per task: prefixes of it are the hold-out sets.
        let pool = eval_sets(&sc, &truth, rep as u64, max_holdout, "holdout")?;
        let test = eval_sets(&sc, &truth, rep as u64, cfg.n_test, "test")?;

        let base_grid = default_grid(&base, penalty, cfg.grid_size, cfg.tuning_grid_min_ratio)?;
        let base_path = fit_path(&base, penalty, &base_grid, &cfg.fit_config())?;

        for (hi, &h) in cfg.holdout_sizes.iter().enumerate() {
            if h == 0 || h > max_holdout {
                return Err(Error::InvalidKind(format!("holdout size {h} out of range")));
            }
            let held: Vec<(Array2<f64>, Array1<f64>)> = pool
                .iter()
                .map(|(x, y)| (x.slice(s![..h, ..]).to_owned(), y.slice(s![..h]).to_owned()))
                .collect();

            // Adaptive: pool the extra labelled rows into both the score and the
            // reference covariance (they join both samples, hence overlap h),
            // then select λ without any data splitting.
            let mut pooled_tasks = Vec::with_capacity(num_tasks);
            for (task, (x, y, x_tilde)) in raw.iter().enumerate() {
                let (hx, hy) = &held[task];
                let x_pool = concatenate(Axis(0), &[x.view(), hx.view()])
                    .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
                let y_pool = concatenate(Axis(0), &[y.view(), hy.view()])
                    .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
                let xt_pool = concatenate(Axis(0), &[x_tilde.view(), hx.view()])
                    .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
                pooled_tasks.push(summarize(&x_pool, &y_pool, &xt_pool)?);
            }
            let pooled = TaskBundle::new(pooled_tasks)?;
            let grid = default_grid(&pooled, penalty, cfg.grid_size, cfg.tuning_grid_min_ratio)?;
            let path = fit_path(&pooled, penalty, &grid, &cfg.fit_config())?;
            let report = lepski_select(&pooled, &path, cfg.cbar)?;
            let (mse, _) = prediction_mse(&path[report.chosen_index].coef, &test)?;
            push_rows(&mut buckets[hi], name, penalty, rep, h as f64, "adaptive", &mse);

            // Hold-out: spend the same rows on selection over the base path.
            let (idx, _) = holdout_select(&base_path, &held)?;
            let (mse, _) = prediction_mse(&base_path[idx].coef, &test)?;
            push_rows(&mut buckets[hi], name, penalty, rep, h as f64, "holdout", &mse);
        }
    }
    Ok(buckets.into_iter().flatten().collect())
}

/// Repeats one column across all tasks (for pooled single-task baselines).
fn broadcast_column(col: &Array1<f64>, num_tasks: usize) -> CoefMatrix {
    let mut m = Array2::zeros((col.len(), num_tasks));
    for q in 0..num_tasks {
        m.column_mut(q).assign(col);
    }
    CoefMatrix::from_raw(m)
}

/// Total squared hold-out error of a coefficient matrix across all tasks.
fn holdout_error(coef: &CoefMatrix, holdout: &[(Array2<f64>, Array1<f64>)]) -> f64 {
    let mut total = 0.0;
    for (task, (x, y)) in holdout.iter().enumerate() {
        let resid = &x.dot(&coef.column(task).to_owned()) - y;
        total += resid.dot(&resid);
    }
    total
}

/// Ridge solutions (Σ̃ + λI)⁻¹s over a λ grid.
fn ridge_path(sigma: &Array2<f64>, score: &Array1<f64>, grid: &[f64]) -> Result<Vec<Array1<f64>>> {
    grid.iter()
        .map(|&lam| {
            let mut a = sigma.clone();
            for i in 0..a.nrows() {
                a[[i, i]] += lam;
            }
            a.solve(score)
                .map_err(|e| Error::ConvergenceFailure(format!("ridge solve at lambda {lam}: {e}")))
        })
        .collect()
}

fn geometric_grid(top: f64, size: usize, min_ratio: f64) -> Vec<f64> {
    let top = top.max(1e-12);
    if size <= 1 {
        return vec![top];
    }
    (0..size)
        .map(|i| top * min_ratio.powf((size - 1 - i) as f64 / (size - 1) as f64))
        .collect()
}

/// Penalized single-task path for one task's summary, mirroring the multi-task
/// penalty: lasso columns under the group penalty, ridge columns under the
/// nuclear penalty (where a single column makes the nuclear norm an ℓ2 norm and
/// ridge is the conventional baseline).
fn single_task_path(
    task: &TaskSummary,
    penalty: PenaltySpec,
    cfg: &ExperimentConfig,
) -> Result<Vec<Array1<f64>>> {
    match penalty {
        PenaltySpec::GroupSparse => {
            let bundle = TaskBundle::new(vec![task.clone()])?;
            let grid = default_grid(&bundle, penalty, cfg.grid_size, cfg.grid_min_ratio)?;
            let path = fit_path(&bundle, penalty, &grid, &cfg.fit_config())?;
            Ok(path.into_iter().map(|r| r.coef.into_values().column(0).to_owned()).collect())
        }
        PenaltySpec::LowRank => {
            let top = task.s.dot(&task.s).sqrt();
            let grid = geometric_grid(top, cfg.grid_size, cfg.grid_min_ratio);
            ridge_path(&task.sigma, &task.s, &grid)
        }
    }
}

fn single_vs_multi(penalty: PenaltySpec, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let p = cfg.p.unwrap_or(50);
    let n = cfg.n.unwrap_or(100);
    let name = ScenarioKind::SingleVsMulti.name();
    let mut rows = Vec::new();
    for &num_tasks in &cfg.task_counts {
        if num_tasks == 0 {
            return Err(Error::InvalidKind("task_counts entries must be >= 1".into()));
        }
        let sc = Scenario::build(ScenarioConfig {
            p,
            num_tasks,
            n,
            n_tilde: n,
            rho: 0.0,
            coef: coef_kind(penalty, p, num_tasks),
            sigma1: CovSpec::Identity,
            sigma2: CovSpec::Identity,
            noise_sd: 1.0,
            seed: cfg.seed,
        })?;
        for rep in 0..cfg.reps {
            let truth = sc.ground_truth(rep as u64)?;
            let bundle = sc.gen_bundle(&truth, rep as u64)?;
            let tune = eval_sets(&sc, &truth, rep as u64, cfg.n_tune, "tune")?;
            let test = eval_sets(&sc, &truth, rep as u64, cfg.n_test, "test")?;
            let sweep = num_tasks as f64;

            let mse = tuned_mse(&bundle, penalty, cfg, &tune, &test)?;
            push_rows(&mut rows, name, penalty, rep, sweep, "proxy", &mse);

            // Pooled baseline: average the per-task summaries into one task and
            // apply its single solution to every task.
            let mut s_bar = Array1::<f64>::zeros(p);
            let mut sigma_bar = Array2::<f64>::zeros((p, p));
            for t in bundle.tasks() {
                s_bar += &t.s;
                sigma_bar += &t.sigma;
            }
            s_bar /= num_tasks as f64;
            sigma_bar /= num_tasks as f64;
            let pooled_task = TaskSummary {
                s: s_bar,
                sigma: sigma_bar,
                n_discovery: n * num_tasks,
                n_proxy: n * num_tasks,
                overlap_count: None,
            };
            let pooled_path = single_task_path(&pooled_task, penalty, cfg)?;
            let pooled_best = select_broadcast(&pooled_path, num_tasks, &tune);
            let (mse, _) = prediction_mse(&pooled_best, &test)?;
            push_rows(&mut rows, name, penalty, rep, sweep, "pooled_single", &mse);

            // Split baseline: each task fits and tunes on its own data only.
            let mut split = Array2::<f64>::zeros((p, num_tasks));
            for task in 0..num_tasks {
                let path = single_task_path(bundle.task(task), penalty, cfg)?;
                let col = select_column(&path, std::slice::from_ref(&tune[task]));
                split.column_mut(task).assign(&col);
            }
            let (mse, _) = prediction_mse(&CoefMatrix::from_raw(split), &test)?;
            push_rows(&mut rows, name, penalty, rep, sweep, "split_single", &mse);
        }
    }
    Ok(rows)
}

/// Broadcasts each path column to all tasks, selects by total hold-out error
/// (ties to the larger λ), and returns the winner.
fn select_broadcast(
    path: &[Array1<f64>],
    num_tasks: usize,
    tune: &[(Array2<f64>, Array1<f64>)],
) -> CoefMatrix {
    let mut best: Option<(f64, CoefMatrix)> = None;
    for col in path {
        let cand = broadcast_column(col, num_tasks);
        let err = holdout_error(&cand, tune);
        if best.as_ref().map_or(true, |(e, _)| err <= *e) {
            best = Some((err, cand));
        }
    }
    best.expect("path is never empty").1
}

/// Selects one column by its own task's hold-out error (ties to the larger λ).
fn select_column(path: &[Array1<f64>], tune: &[(Array2<f64>, Array1<f64>)]) -> Array1<f64> {
    let mut best: Option<(f64, &Array1<f64>)> = None;
    for col in path {
        let (x, y) = &tune[0];
        let resid = &x.dot(col) - y;
        let err = resid.dot(&resid);
        if best.map_or(true, |(e, _)| err <= e) {
            best = Some((err, col));
        }
    }
    best.expect("path is never empty").1.clone()
}
