//! Proximal operators for the two penalties and the thin SVD they share.
//!
//! Both operators solve argmin_Z ½‖Z − M‖_F² + t·P(Z): row-wise shrinkage for the
//! group penalty, singular-value shrinkage for the nuclear penalty.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::SVD;

use crate::error::{Error, Result};

/// Row-wise group soft-threshold: each row is scaled by max(0, 1 − t/‖row‖₂);
/// zero rows stay zero.
pub fn group_soft_threshold(m: &Array2<f64>, t: f64) -> Result<Array2<f64>> {
    if t < 0.0 {
        return Err(Error::NegativeThreshold(t));
    }
    let mut out = m.clone();
    for mut row in out.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm == 0.0 {
            continue;
        }
        let scale = (1.0 - t / norm).max(0.0);
        row.mapv_inplace(|v| v * scale);
    }
    Ok(out)
}

/// Singular value thresholding: U·diag(max(σ − t, 0))·Vᵀ.
pub fn svt(m: &Array2<f64>, t: f64) -> Result<Array2<f64>> {
    if t < 0.0 {
        return Err(Error::NegativeThreshold(t));
    }
    let (u, sigma, v) = thin_svd(m)?;
    let shrunk = sigma.mapv(|s| (s - t).max(0.0));
    let us = &u * &shrunk; // scales column i of U by shrunk[i]
    Ok(us.dot(&v.t()))
}

/// Thin SVD: M = U·diag(σ)·Vᵀ with orthonormal U (p×k), V (Q×k), σ
/// nonincreasing and nonnegative, k = min(p, Q).
///
/// LAPACK computes the full factors; they are sliced down to the leading k
/// columns, which is all the shrinkage operator needs.
pub fn thin_svd(m: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let k = m.nrows().min(m.ncols());
    let (u_full, sigma, vt_full) = m
        .svd(true, true)
        .map_err(|e| Error::SvdFailure(format!("thin SVD: {e}")))?;
    let (u_full, vt_full) = match (u_full, vt_full) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::SvdFailure("SVD returned no factor matrices".into())),
    };
    let u = u_full.slice(s![.., ..k]).to_owned();
    let v = vt_full.slice(s![..k, ..]).t().to_owned();
    Ok((u, sigma, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.sample::<f64, _>(StandardNormal))
    }

    fn check_svd_postconditions(m: &Array2<f64>) {
        let (u, sigma, v) = thin_svd(m).unwrap();
        let k = m.nrows().min(m.ncols());
        assert_eq!(sigma.len(), k);
        for i in 1..k {
            assert!(sigma[i] <= sigma[i - 1] && sigma[i] >= 0.0);
        }
        let utu = u.t().dot(&u);
        let vtv = v.t().dot(&v);
        let eye = Array2::<f64>::eye(k);
        assert!(linalg::max_abs(&(&utu - &eye).view()) <= 1e-8, "UᵀU not orthonormal");
        assert!(linalg::max_abs(&(&vtv - &eye).view()) <= 1e-8, "VᵀV not orthonormal");
        let us = &u * &sigma;
        let rec = us.dot(&v.t());
        let scale = 1.0 + linalg::max_abs(&m.view());
        assert!(linalg::max_abs(&(&rec - m).view()) <= 1e-8 * scale, "reconstruction failed");
    }

    #[test]
    fn group_threshold_zero_is_identity() {
        let m = array![[1.0, -2.0], [0.0, 0.5]];
        assert_eq!(group_soft_threshold(&m, 0.0).unwrap(), m);
    }

    #[test]
    fn group_threshold_kills_small_rows() {
        let m = array![[3.0, 4.0]];
        let out = group_soft_threshold(&m, 5.0).unwrap();
        assert_eq!(out, array![[0.0, 0.0]]);
    }

    #[test]
    fn group_threshold_shrinks_toward_zero() {
        let m = array![[3.0, 4.0]];
        let out = group_soft_threshold(&m, 1.0).unwrap();
        assert!((out[[0, 0]] - 2.4).abs() < 1e-12);
        assert!((out[[0, 1]] - 3.2).abs() < 1e-12);
    }

    #[test]
    fn negative_threshold_rejected() {
        let m = Array2::<f64>::zeros((2, 2));
        assert!(matches!(group_soft_threshold(&m, -0.1), Err(Error::NegativeThreshold(_))));
        assert!(matches!(svt(&m, -0.1), Err(Error::NegativeThreshold(_))));
    }

    #[test]
    fn group_rows_never_grow() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let m = random_matrix(5, 3, &mut rng);
            let t: f64 = rng.random::<f64>() * 2.0;
            let out = group_soft_threshold(&m, t).unwrap();
            for (r_in, r_out) in m.rows().into_iter().zip(out.rows()) {
                let n_in = r_in.dot(&r_in).sqrt();
                let n_out = r_out.dot(&r_out).sqrt();
                assert!(n_out <= n_in + 1e-12);
            }
        }
    }

    #[test]
    fn svt_zero_threshold_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(6, 4, &mut rng);
        let out = svt(&m, 0.0).unwrap();
        assert!(linalg::max_abs(&(&out - &m).view()) <= 1e-10);
    }

    #[test]
    fn svt_on_diagonal_matrix() {
        let m = Array2::from_diag(&array![5.0, 2.0, 1.0]);
        let out = svt(&m, 2.0).unwrap();
        let expected = Array2::from_diag(&array![3.0, 0.0, 0.0]);
        assert!(linalg::max_abs(&(&out - &expected).view()) <= 1e-9);
    }

    #[test]
    fn svt_above_operator_norm_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_matrix(4, 3, &mut rng);
        let top = crate::objective::dual_norm(&m, crate::bundle::PenaltySpec::LowRank).unwrap();
        let out = svt(&m, top + 0.1).unwrap();
        assert!(linalg::max_abs(&out.view()) <= 1e-9);
    }

    #[test]
    fn svt_shrinks_singular_values_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let m = random_matrix(8, 4, &mut rng);
            let (_, sigma_in, _) = thin_svd(&m).unwrap();
            let t = 0.7;
            let out = svt(&m, t).unwrap();
            let (_, sigma_out, _) = thin_svd(&out).unwrap();
            for i in 0..sigma_in.len() {
                let expected = (sigma_in[i] - t).max(0.0);
                assert!((sigma_out[i] - expected).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn thin_svd_of_identity() {
        let (_, sigma, _) = thin_svd(&Array2::<f64>::eye(3)).unwrap();
        for s in sigma.iter() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn thin_svd_of_rank_one_product() {
        // ‖u‖ = 2, ‖v‖ = 3 so the lone singular value is 6.
        let u = array![1.2, -1.6, 0.0, 0.0];
        let v = array![2.0, -2.0, 1.0];
        let mut m = Array2::<f64>::zeros((4, 3));
        for i in 0..4 {
            for j in 0..3 {
                m[[i, j]] = u[i] * v[j];
            }
        }
        let (_, sigma, _) = thin_svd(&m).unwrap();
        assert!((sigma[0] - 6.0).abs() < 1e-9);
        assert!(sigma[1].abs() < 1e-9 && sigma[2].abs() < 1e-9);
        check_svd_postconditions(&m);
    }

    #[test]
    fn thin_svd_postconditions_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            check_svd_postconditions(&random_matrix(8, 3, &mut rng));
            check_svd_postconditions(&random_matrix(3, 8, &mut rng)); // wide branch
            check_svd_postconditions(&random_matrix(5, 5, &mut rng));
        }
    }

    #[test]
    fn thin_svd_of_zero_matrix() {
        let m = Array2::<f64>::zeros((4, 2));
        check_svd_postconditions(&m);
    }

    #[test]
    fn both_operators_are_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let a = random_matrix(5, 3, &mut rng);
            let b = random_matrix(5, 3, &mut rng);
            let t: f64 = rng.random::<f64>() * 1.5;
            let dist_in = linalg::frob_norm(&(&a - &b).view());
            let ga = group_soft_threshold(&a, t).unwrap();
            let gb = group_soft_threshold(&b, t).unwrap();
            assert!(linalg::frob_norm(&(&ga - &gb).view()) <= dist_in + 1e-9);
            let sa = svt(&a, t).unwrap();
            let sb = svt(&b, t).unwrap();
            assert!(linalg::frob_norm(&(&sa - &sb).view()) <= dist_in + 1e-9);
        }
    }

    /// Brute-force check of the group prox objective on one 2×2 instance; the
    /// objective separates across rows, so each row is a 2-D grid search.
    #[test]
    fn group_prox_matches_row_grid_search() {
        let m = array![[0.9, -0.4], [0.2, 0.1]];
        let t = 0.3;
        let out = group_soft_threshold(&m, t).unwrap();
        let half = 2.0 * linalg::max_abs(&m.view());
        let step = 1e-3;
        for (row_in, row_out) in m.rows().into_iter().zip(out.rows()) {
            let n = (half / step).ceil() as i64;
            let mut best = (f64::INFINITY, 0.0, 0.0);
            for i in -n..=n {
                let z0 = i as f64 * step;
                let d0 = z0 - row_in[0];
                for j in -n..=n {
                    let z1 = j as f64 * step;
                    let d1 = z1 - row_in[1];
                    let obj = 0.5 * (d0 * d0 + d1 * d1) + t * (z0 * z0 + z1 * z1).sqrt();
                    if obj < best.0 {
                        best = (obj, z0, z1);
                    }
                }
            }
            assert!((best.1 - row_out[0]).abs() <= 2.0 * step, "{} vs {}", best.1, row_out[0]);
            assert!((best.2 - row_out[1]).abs() <= 2.0 * step);
        }
    }
}
