//! Shared distribution helpers: normal cdf/quantile, truncated normal
//! draws, Wishart / inverse-Wishart sampling, and jittered Cholesky.

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

pub const LN_2PI: f64 = 1.837877066409345483560659472811;

pub fn norm_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

pub fn norm_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p == 0.0 || p == 1.0 {
        return Err(Error::InvalidInput(format!(
            "probit is undefined at p={p}; need p strictly inside (0,1)"
        )));
    }
    Ok(Normal::standard().inverse_cdf(p))
}

#[inline]
pub fn norm_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    let r = x - mean;
    -0.5 * (LN_2PI + var.ln() + r * r / var)
}

/// Draw z ~ N(0,1) conditioned on z > a. Rejection from the untruncated
/// normal when the region keeps decent mass; Robert's shifted-exponential
/// proposal deep in the upper tail (a > 0), which stays exact for any a.
pub fn std_normal_lower_truncated<R: Rng + ?Sized>(rng: &mut R, a: f64) -> f64 {
    if a <= 0.0 {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if z > a {
                return z;
            }
        }
    } else {
        let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let u1: f64 = rng.gen::<f64>();
            let z = a - u1.ln() / lambda;
            let u2: f64 = rng.gen::<f64>();
            let d = z - lambda;
            if u2 <= (-0.5 * d * d).exp() {
                return z;
            }
        }
    }
}

/// kappa ~ N(mean, 1) truncated to (0, inf) when `positive`, else (-inf, 0].
pub fn truncnorm_unit<R: Rng + ?Sized>(rng: &mut R, mean: f64, positive: bool) -> f64 {
    if positive {
        mean + std_normal_lower_truncated(rng, -mean)
    } else {
        mean - std_normal_lower_truncated(rng, mean)
    }
}

/// Cholesky with a one-shot diagonal jitter fallback. Returns the factor and
/// whether jitter was applied.
pub fn cholesky_jitter(
    mat: &DMatrix<f64>,
    jitter: f64,
    context: &str,
) -> Result<(Cholesky<f64, Dyn>, bool)> {
    if let Some(ch) = Cholesky::new(mat.clone()) {
        return Ok((ch, false));
    }
    let mut m = mat.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += jitter;
    }
    match Cholesky::new(m) {
        Some(ch) => Ok((ch, true)),
        None => Err(Error::Singular {
            context: context.to_string(),
        }),
    }
}

/// Log-determinant of A from its Cholesky factor L (A = L L^T).
pub fn chol_logdet(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    let mut s = 0.0;
    for i in 0..l.nrows() {
        s += l[(i, i)].ln();
    }
    2.0 * s
}

/// MVN(0, A) log-density via the Cholesky factor of A.
pub fn mvn_logpdf_chol(chol: &Cholesky<f64, Dyn>, x: &DVector<f64>) -> f64 {
    let n = x.len() as f64;
    let z = chol.l().solve_lower_triangular(x).expect("nonsingular factor");
    -0.5 * (n * LN_2PI + chol_logdet(chol) + z.dot(&z))
}

/// Draw from MVN(0, A) given the Cholesky factor of A.
pub fn mvn_sample_chol<R: Rng + ?Sized>(chol: &Cholesky<f64, Dyn>, rng: &mut R) -> DVector<f64> {
    let n = chol.l_dirty().nrows();
    let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    chol.l() * z
}

/// Draw from MVN(mean, P^{-1}) given the Cholesky factor of the precision P.
/// Solves L^T x = z so that x has covariance P^{-1}.
pub fn mvn_sample_from_precision_chol<R: Rng + ?Sized>(
    prec_chol: &Cholesky<f64, Dyn>,
    mean: &DVector<f64>,
    rng: &mut R,
) -> DVector<f64> {
    let n = mean.len();
    let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x = prec_chol
        .l()
        .transpose()
        .solve_upper_triangular(&z)
        .expect("nonsingular factor");
    mean + x
}

/// Wishart(df, S) draw via Bartlett decomposition; `scale_chol_l` is the
/// lower Cholesky factor of the scale matrix S. Requires df > d - 1.
pub fn sample_wishart<R: Rng + ?Sized>(
    df: f64,
    scale_chol_l: &DMatrix<f64>,
    rng: &mut R,
) -> DMatrix<f64> {
    let d = scale_chol_l.nrows();
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        let chi = ChiSquared::new(df - i as f64).expect("df > d-1");
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let la = scale_chol_l * a;
    &la * la.transpose()
}

/// Inverse-Wishart(df, Psi) draw: W ~ Wishart(df, Psi^{-1}), return W^{-1}.
pub fn sample_inverse_wishart<R: Rng + ?Sized>(
    df: f64,
    psi: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let psi_chol = Cholesky::new(psi.clone()).ok_or(Error::Singular {
        context: "inverse-Wishart scale".into(),
    })?;
    let psi_inv = psi_chol.inverse();
    let l = Cholesky::new(psi_inv).ok_or(Error::Singular {
        context: "inverse-Wishart inverted scale".into(),
    })?;
    let w = sample_wishart(df, &l.l_dirty().lower_triangle().into(), rng);
    let w_chol = Cholesky::new(w).ok_or(Error::Singular {
        context: "Wishart draw inversion".into(),
    })?;
    Ok(w_chol.inverse())
}
