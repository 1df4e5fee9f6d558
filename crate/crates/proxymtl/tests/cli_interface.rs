//! Black-box checks of the command-line binary: each test spawns the compiled
//! executable against real files in a temporary directory and asserts on exit
//! codes, output artifacts, and error text.

use std::path::Path;
use std::process::{Command, Output};

use proxymtl::io::{read_matrix_csv, write_matrix_csv, write_vector_csv};
use proxymtl::simgen::{CoefKind, CovSpec, Scenario, ScenarioConfig};
use proxymtl::tuning::default_grid;
use proxymtl::{save_bundle, PenaltySpec, TaskBundle};

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxymtl"))
        .args(args)
        .output()
        .expect("spawn the proxymtl binary")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

/// Small two-task scenario used by every bundle-backed test.
fn small_scenario() -> Scenario {
    Scenario::build(ScenarioConfig {
        p: 8,
        num_tasks: 2,
        n: 40,
        n_tilde: 40,
        rho: 0.0,
        coef: CoefKind::SparseRows(3),
        sigma1: CovSpec::Identity,
        sigma2: CovSpec::Identity,
        noise_sd: 0.5,
        seed: 91,
    })
    .unwrap()
}

/// Writes a bundle directory and returns the in-memory bundle alongside.
fn write_bundle(dir: &Path) -> TaskBundle {
    let sc = small_scenario();
    let truth = sc.ground_truth(0).unwrap();
    let bundle = sc.gen_bundle(&truth, 0).unwrap();
    save_bundle(&bundle, dir).unwrap();
    bundle
}

/// λ strictly above the zero-forcing threshold, so the solution is exactly
/// zero (at the threshold itself a one-ulp rounding in the prox scale can
/// leave a tiny nonzero row).
fn dominating_lambda(bundle: &TaskBundle, spec: PenaltySpec) -> f64 {
    let grid = default_grid(bundle, spec, 4, 0.1).unwrap();
    2.0 * grid.last().copied().unwrap()
}

#[test]
fn fit_with_dominating_lambda_writes_zero_coefficients() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    let bundle = write_bundle(&bundle_dir);
    let lambda = dominating_lambda(&bundle, PenaltySpec::GroupSparse);
    let out_path = tmp.path().join("coef.csv");

    let out = run_cli(&[
        "fit",
        "--bundle",
        bundle_dir.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--lambda",
        &lambda.to_string(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));

    let coef = read_matrix_csv(&out_path).unwrap();
    assert_eq!(coef.dim(), (bundle.p(), bundle.num_tasks()));
    assert!(coef.iter().all(|&v| v == 0.0), "expected the exact zero matrix");

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("coef.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["converged"], serde_json::Value::Bool(true));
    assert_eq!(sidecar["lambda"].as_f64().unwrap(), lambda);
    assert!(sidecar["objective"].as_f64().unwrap().is_finite());
}

#[test]
fn fit_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    let bundle = write_bundle(&bundle_dir);
    let grid = default_grid(&bundle, PenaltySpec::LowRank, 4, 0.1).unwrap();
    let lambda = grid[1].to_string();

    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out_path = tmp.path().join(name);
        let out = run_cli(&[
            "fit",
            "--bundle",
            bundle_dir.to_str().unwrap(),
            "--penalty",
            "lowrank",
            "--lambda",
            &lambda,
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
        outputs.push((
            std::fs::read(&out_path).unwrap(),
            std::fs::read(out_path.with_extension("json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "coefficient CSV differs between identical runs");
    assert_eq!(outputs[0].1, outputs[1].1, "sidecar JSON differs between identical runs");
}

#[test]
fn fit_hitting_the_iteration_cap_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    let bundle = write_bundle(&bundle_dir);
    let grid = default_grid(&bundle, PenaltySpec::GroupSparse, 4, 0.01).unwrap();
    let out_path = tmp.path().join("coef.csv");

    let out = run_cli(&[
        "fit",
        "--bundle",
        bundle_dir.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--lambda",
        &grid[0].to_string(),
        "--max-iters",
        "1",
        "--tol",
        "1e-12",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_text(&out));

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("coef.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["converged"], serde_json::Value::Bool(false));
    assert_eq!(sidecar["iterations"].as_u64().unwrap(), 1);
}

#[test]
fn fit_without_a_bundle_reports_the_missing_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();

    let out = run_cli(&[
        "fit",
        "--bundle",
        empty.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--lambda",
        "0.5",
        "--out",
        tmp.path().join("coef.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    let err = stderr_text(&out);
    assert!(err.starts_with("error:"), "unexpected stderr: {err}");
    assert!(err.contains("manifest.json"), "unexpected stderr: {err}");
}

#[test]
fn missing_required_arguments_fail_cleanly() {
    let out = run_cli(&["fit"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_text(&out).contains("required"), "unexpected stderr: {}", stderr_text(&out));

    let out = run_cli(&[]);
    assert_eq!(exit_code(&out), 1);

    let out = run_cli(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.contains("fit") && text.contains("tune") && text.contains("experiment"));
}

#[test]
fn step_argument_accepts_numbers_and_rejects_junk() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    let bundle = write_bundle(&bundle_dir);
    let lambda = dominating_lambda(&bundle, PenaltySpec::GroupSparse).to_string();
    let out_path = tmp.path().join("coef.csv");
    let base = [
        "fit",
        "--bundle",
        bundle_dir.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--lambda",
        &lambda,
        "--out",
        out_path.to_str().unwrap(),
    ];

    let mut with_step = base.to_vec();
    with_step.extend(["--step", "0.05"]);
    let out = run_cli(&with_step);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));

    let mut with_junk = base.to_vec();
    with_junk.extend(["--step", "bogus"]);
    let out = run_cli(&with_junk);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_text(&out).contains("step"), "unexpected stderr: {}", stderr_text(&out));
}

#[test]
fn tune_lepski_with_a_huge_constant_picks_the_grid_floor() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    write_bundle(&bundle_dir);
    let out_path = tmp.path().join("report.json");

    // Every pair is feasible under an enormous constant, so the selector must
    // return the smallest grid value.
    let out = run_cli(&[
        "tune",
        "--bundle",
        bundle_dir.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--method",
        "lepski",
        "--cbar",
        "1e9",
        "--grid-size",
        "6",
        "--grid-min-ratio",
        "0.05",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["method"], "lepski");
    assert_eq!(report["chosen_index"].as_u64().unwrap(), 0);
    let grid: Vec<f64> =
        report["grid"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(grid.len(), 6);
    assert_eq!(report["chosen_lambda"].as_f64().unwrap(), grid[0]);
    assert!(report["feasible"].as_array().unwrap().iter().all(|v| v.as_bool().unwrap()));

    let gaps = read_matrix_csv(&out_path.with_extension("csv")).unwrap();
    assert_eq!(gaps.dim(), (6, 6), "gap matrix should cover the whole grid");
}

#[test]
fn tune_holdout_requires_the_holdout_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    write_bundle(&bundle_dir);

    let out = run_cli(&[
        "tune",
        "--bundle",
        bundle_dir.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--method",
        "holdout",
        "--out",
        tmp.path().join("report.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_text(&out).contains("--holdout"), "unexpected stderr: {}", stderr_text(&out));
}

#[test]
fn tune_holdout_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle_dir = tmp.path().join("bundle");
    write_bundle(&bundle_dir);

    let sc = small_scenario();
    let truth = sc.ground_truth(0).unwrap();
    let holdout_dir = tmp.path().join("holdout");
    std::fs::create_dir(&holdout_dir).unwrap();
    for q in 0..2 {
        let (x, y) = sc.gen_eval_data(&truth, 0, q, 25, "tune").unwrap();
        write_matrix_csv(&holdout_dir.join(format!("x_{q}.csv")), &x).unwrap();
        write_vector_csv(&holdout_dir.join(format!("y_{q}.csv")), &y).unwrap();
    }

    let out_path = tmp.path().join("report.json");
    let out = run_cli(&[
        "tune",
        "--bundle",
        bundle_dir.to_str().unwrap(),
        "--penalty",
        "sparse",
        "--method",
        "holdout",
        "--holdout",
        holdout_dir.to_str().unwrap(),
        "--grid-size",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["method"], "holdout");
    let grid: Vec<f64> =
        report["grid"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let errors = report["errors"].as_array().unwrap();
    assert_eq!(grid.len(), 5);
    assert_eq!(errors.len(), 5);
    let chosen = report["chosen_index"].as_u64().unwrap() as usize;
    assert!(chosen < 5);
    assert_eq!(report["chosen_lambda"].as_f64().unwrap(), grid[chosen]);

    let csv = std::fs::read_to_string(out_path.with_extension("csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "lambda,error");
    assert_eq!(lines.len(), 6, "header plus one row per grid value");
}

#[test]
fn experiment_unknown_scenario_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_cli(&[
        "experiment",
        "--scenario",
        "bogus",
        "--penalty",
        "sparse",
        "--out",
        tmp.path().join("rows.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_text(&out).contains("unknown scenario"),
        "unexpected stderr: {}",
        stderr_text(&out)
    );
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.json");
    // Partial override: unnamed settings keep their defaults.
    std::fs::write(
        &config_path,
        r#"{"grid_size": 4, "tol": 1e-5, "max_iters": 400, "n_test": 10, "n_tune": 10,
            "tau_values": [0.5, 2.0], "p": 8, "num_tasks": 2, "n": 25}"#,
    )
    .unwrap();

    let mut outputs = Vec::new();
    for name in ["rows_a.csv", "rows_b.csv"] {
        let out_path = tmp.path().join(name);
        let out = run_cli(&[
            "experiment",
            "--scenario",
            "tau-sweep",
            "--penalty",
            "sparse",
            "--reps",
            "2",
            "--seed",
            "7",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
        outputs.push(std::fs::read_to_string(&out_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "results CSV differs between identical runs");
    let lines: Vec<&str> = outputs[0].lines().collect();
    assert_eq!(lines[0], "scenario,penalty,rep,sweep_param,estimator,task,mse");
    assert!(lines.len() > 1, "expected at least one result row");
}
