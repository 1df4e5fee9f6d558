//! Bundle directory format: a `manifest.json` naming per-task score and covariance
//! CSV files (paths relative to the manifest), plus the sample sizes.
//!
//! Matrix and vector CSVs are headerless; values are written with Rust's shortest
//! round-trip decimal formatting, so save → load reproduces every f64 bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::bundle::{validate_bundle, TaskBundle, TaskSummary};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Manifest {
    p: usize,
    tasks: Vec<ManifestTask>,
}

#[derive(Serialize, Deserialize)]
struct ManifestTask {
    s: String,
    sigma: String,
    n_discovery: usize,
    n_proxy: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overlap_count: Option<usize>,
}

/// Reads and validates a bundle from a directory containing `manifest.json`.
pub fn load_bundle(dir: &Path) -> Result<TaskBundle> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::from_read(e, &manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::ParseError { path: manifest_path.clone(), msg: e.to_string() })?;

    let mut tasks = Vec::with_capacity(manifest.tasks.len());
    for mt in &manifest.tasks {
        let s = read_vector_csv(&dir.join(&mt.s))?;
        if s.len() != manifest.p {
            return Err(Error::DimensionMismatch(format!(
                "{}: length {} does not match manifest p = {}",
                mt.s,
                s.len(),
                manifest.p
            )));
        }
        let sigma = read_matrix_csv(&dir.join(&mt.sigma))?;
        tasks.push(TaskSummary {
            s,
            sigma,
            n_discovery: mt.n_discovery,
            n_proxy: mt.n_proxy,
            overlap_count: mt.overlap_count,
        });
    }
    validate_bundle(TaskBundle::new(tasks)?)
}

/// Writes a bundle as `manifest.json` plus `s_q.csv` / `sigma_q.csv` per task,
/// creating the directory if needed.
pub fn save_bundle(bundle: &TaskBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut tasks = Vec::with_capacity(bundle.num_tasks());
    for (q, t) in bundle.tasks().iter().enumerate() {
        let s_name = format!("s_{q}.csv");
        let sigma_name = format!("sigma_{q}.csv");
        write_vector_csv(&dir.join(&s_name), &t.s)?;
        write_matrix_csv(&dir.join(&sigma_name), &t.sigma)?;
        tasks.push(ManifestTask {
            s: s_name,
            sigma: sigma_name,
            n_discovery: t.n_discovery,
            n_proxy: t.n_proxy,
            overlap_count: t.overlap_count,
        });
    }
    let manifest = Manifest { p: bundle.p(), tasks };
    write_json(&dir.join("manifest.json"), &manifest)
}

/// Serializes any value as pretty JSON with sorted keys and a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::ParseError { path: path.to_path_buf(), msg: e.to_string() })?;
    let mut text = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::ParseError { path: path.to_path_buf(), msg: e.to_string() })?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_vector_csv(path: &Path) -> Result<Array1<f64>> {
    let m = read_matrix_csv(path)?;
    if m.ncols() != 1 {
        return Err(Error::ParseError {
            path: path.to_path_buf(),
            msg: format!("expected a single column, found {}", m.ncols()),
        });
    }
    Ok(m.column(0).to_owned())
}

pub fn write_vector_csv(path: &Path, v: &Array1<f64>) -> Result<()> {
    let mut text = String::new();
    for x in v.iter() {
        let _ = writeln!(text, "{x}");
    }
    fs::write(path, text)?;
    Ok(())
}

/// Headerless comma-separated matrix; all rows must have the same width.
pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::from_read(e, path))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (j, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::ParseError {
                path: path.to_path_buf(),
                msg: format!("line {}, field {}: cannot parse {field:?} as a number", i + 1, j + 1),
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::ParseError {
                    path: path.to_path_buf(),
                    msg: format!(
                        "line {}: {} fields, expected {} (ragged rows)",
                        i + 1,
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::ParseError { path: path.to_path_buf(), msg: "empty matrix file".into() });
    }
    let ncols = rows[0].len();
    let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
    Array2::from_shape_vec((rows.len(), ncols), flat)
        .map_err(|e| Error::ParseError { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn write_matrix_csv(path: &Path, m: &Array2<f64>) -> Result<()> {
    fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

/// CSV text for a matrix; `{}` formatting keeps decimal notation and full
/// round-trip precision.
pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut text = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(text, "{}", line.join(","));
    }
    text
}
