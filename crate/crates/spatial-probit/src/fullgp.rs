//! Dense Gaussian-process reference: exact log-density and sampling via
//! full covariance factorization. Used by the FullGP model variant at
//! reduced scale and as the ground-truth oracle for the sparse and
//! reduced-rank approximations.

use crate::covariance::{cov_cholesky, cov_matrix, MaternParams};
use crate::error::{Error, Result};
use crate::stats::{mvn_logpdf_chol, mvn_sample_chol};
use nalgebra::DVector;
use rand::Rng;

/// Guard against accidental O(n^3) work on full-size images.
pub const DEFAULT_DENSE_LIMIT: usize = 2000;

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::DenseLimitExceeded { n, limit });
    }
    Ok(())
}

/// Exact MVN(0, C(S,S|theta)) log-density of w.
pub fn gp_logdensity(w: &[f64], coords: &[[f64; 2]], theta: &MaternParams) -> Result<f64> {
    gp_logdensity_with_limit(w, coords, theta, DEFAULT_DENSE_LIMIT)
}

pub fn gp_logdensity_with_limit(
    w: &[f64],
    coords: &[[f64; 2]],
    theta: &MaternParams,
    limit: usize,
) -> Result<f64> {
    if w.len() != coords.len() {
        return Err(Error::DimensionMismatch(format!(
            "w has length {}, coords {}",
            w.len(),
            coords.len()
        )));
    }
    check_limit(coords.len(), limit)?;
    let c = cov_matrix(coords, theta)?;
    let (chol, _) = cov_cholesky(&c, theta.sigma2)?;
    Ok(mvn_logpdf_chol(&chol, &DVector::from_column_slice(w)))
}

/// Draw w ~ MVN(0, C(S,S|theta)); reproducible for a given RNG stream.
pub fn gp_sample<R: Rng + ?Sized>(
    coords: &[[f64; 2]],
    theta: &MaternParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    gp_sample_with_limit(coords, theta, rng, DEFAULT_DENSE_LIMIT)
}

pub fn gp_sample_with_limit<R: Rng + ?Sized>(
    coords: &[[f64; 2]],
    theta: &MaternParams,
    rng: &mut R,
    limit: usize,
) -> Result<Vec<f64>> {
    check_limit(coords.len(), limit)?;
    let c = cov_matrix(coords, theta)?;
    let (chol, _) = cov_cholesky(&c, theta.sigma2)?;
    Ok(mvn_sample_chol(&chol, rng).as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use crate::stats::LN_2PI;

    #[test]
    fn scalar_normal_logdensity() {
        let theta = MaternParams::new(1.0, 0.5, 0.5).unwrap();
        let got = gp_logdensity(&[0.0], &[[0.1, 0.2]], &theta).unwrap();
        assert!((got - (-0.5 * LN_2PI)).abs() < 1e-14);
    }

    #[test]
    fn two_point_density_matches_hand_computed_quadratic_form() {
        let theta = MaternParams::new(2.0, 0.5, 0.5).unwrap();
        let coords = [[0.0, 0.0], [0.3, 0.0]];
        let rho = (-(2.0f64).sqrt() * 0.3 / 0.5).exp();
        let (s2, w) = (2.0, [0.7, -0.4]);
        // 2x2 inverse in closed form.
        let det = s2 * s2 * (1.0 - rho * rho);
        let q = (s2 * w[1] * w[1] + s2 * w[0] * w[0] - 2.0 * s2 * rho * w[0] * w[1]) / det;
        let expect = -0.5 * (2.0 * LN_2PI + det.ln() + q);
        let got = gp_logdensity(&w, &coords, &theta).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn degenerate_variance_gives_near_zero_draws() {
        let theta = MaternParams::new(1e-12, 0.5, 1.5).unwrap();
        let coords = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]];
        let mut rng = derive_rng(9, &[1]);
        let w = gp_sample(&coords, &theta, &mut rng).unwrap();
        assert!(w.iter().all(|v| v.abs() < 1e-4));
    }

    #[test]
    fn sample_moments_match_covariance() {
        let theta = MaternParams::new(1.5, 0.6, 1.5).unwrap();
        let coords = [[0.0, 0.0], [0.2, 0.1], [-0.4, 0.3]];
        let c = cov_matrix(&coords, &theta).unwrap();
        let mut rng = derive_rng(10, &[2]);
        let reps = 20_000;
        let mut acc = nalgebra::DMatrix::<f64>::zeros(3, 3);
        for _ in 0..reps {
            let w = gp_sample(&coords, &theta, &mut rng).unwrap();
            let v = DVector::from_column_slice(&w);
            acc += &v * v.transpose();
        }
        acc /= reps as f64;
        // Each entry's MC standard error is at most ~sqrt(2)*sigma2/sqrt(reps).
        let se = 3.0 * 1.5 * (2.0f64 / reps as f64).sqrt();
        for j in 0..3 {
            for k in 0..3 {
                assert!(
                    (acc[(j, k)] - c[(j, k)]).abs() < se,
                    "({j},{k}): {} vs {}",
                    acc[(j, k)],
                    c[(j, k)]
                );
            }
        }
    }

    #[test]
    fn fixed_seed_reproduces() {
        let theta = MaternParams::new(1.0, 0.4, 0.5).unwrap();
        let coords = [[0.0, 0.0], [0.1, 0.7], [-0.2, 0.2]];
        let a = gp_sample(&coords, &theta, &mut derive_rng(31, &[7])).unwrap();
        let b = gp_sample(&coords, &theta, &mut derive_rng(31, &[7])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dense_limit_enforced() {
        let theta = MaternParams::new(1.0, 0.5, 0.5).unwrap();
        let coords: Vec<[f64; 2]> = (0..11).map(|i| [i as f64 * 0.01, 0.0]).collect();
        let w = vec![0.0; 11];
        let err = gp_logdensity_with_limit(&w, &coords, &theta, 10).unwrap_err();
        assert!(matches!(err, Error::DenseLimitExceeded { n: 11, limit: 10 }));
    }

    /// Density must integrate to 1: quadrature over the scalar case.
    #[test]
    fn scalar_density_integrates_to_one() {
        let theta = MaternParams::new(1.7, 0.5, 0.5).unwrap();
        let coords = [[0.0, 0.0]];
        let sigma = theta.sigma2.sqrt();
        let (lo, hi) = (-10.0 * sigma, 10.0 * sigma);
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = lo + i as f64 * h;
            let f = gp_logdensity(&[x], &coords, &theta).unwrap().exp();
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += w * f;
        }
        s *= h;
        assert!((s - 1.0).abs() < 1e-6, "integral {s}");
    }
}
