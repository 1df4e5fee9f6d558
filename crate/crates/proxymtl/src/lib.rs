//! Penalized multi-task linear regression from summary statistics.
//!
//! Each of Q regression tasks is represented not by raw data but by a score vector
//! s = XᵀY/n from the discovery sample and a reference covariance Σ̃ = X̃ᵀX̃/ñ from a
//! proxy sample. Estimation minimizes
//!
//!   L(B) = Σ_q [ ½ (Be_q)ᵀ Σ̃⁽q⁾ (Be_q) − ⟨s⁽q⁾, Be_q⟩ ] + λ·P(B)
//!
//! by proximal gradient descent, where P is either the row-group ℓ2,1 norm or the
//! nuclear norm. The crate also provides tuning (a pairwise-comparison adaptive rule
//! and hold-out selection), a simulation generator for the data-generating processes
//! used in the experiments, and a CLI (`proxymtl fit|tune|experiment`).

pub mod bundle;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub(crate) mod linalg;
pub mod objective;
pub mod prox;
pub mod simgen;
pub mod solver;
pub mod tuning;

pub use bundle::{validate_bundle, CoefMatrix, FitConfig, PenaltySpec, StepSize, TaskBundle, TaskSummary};
pub use error::{Error, Result};
pub use io::{load_bundle, save_bundle};
pub use objective::{dual_norm, gradient, loss, penalty_norm};
pub use prox::{group_soft_threshold, svt, thin_svd};
pub use simgen::{
    gamma_factor, gen_coef, make_shifted_cov, prediction_mse, summarize, xi_matrix, CoefKind,
    CovSpec, GroundTruth, Scenario, ScenarioConfig,
};
pub use solver::{fit, fit_individual, fit_path, lipschitz_bound, FitResult};
pub use tuning::{holdout_select, lepski_select, pairwise_gap_matrix, LepskiReport};
