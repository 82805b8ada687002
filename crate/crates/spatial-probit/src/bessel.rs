//! Modified Bessel function of the second kind, K_nu, for real order.
//!
//! Evaluated in log space so that the Matern kernel stays finite for large
//! orders and small arguments, where K_nu itself overflows f64. The scheme
//! is the classic fractional-order split: Temme's series for x <= 2 and the
//! Steed continued fraction (CF2) for x > 2, both at reduced order
//! mu in [-1/2, 1/2], followed by upward recurrence with renormalization.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;
const RESCALE: f64 = 1e250;
const LN_RESCALE: f64 = 575.6462732485114; // ln(1e250)

/// ln K_nu(x) for real order nu and x > 0. Uses K_{-nu} = K_nu.
pub fn log_bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "log_bessel_k requires finite nu and x > 0, got nu={nu}, x={x}"
        )));
    }
    let nu = nu.abs();
    let steps = (nu + 0.5).floor() as usize;
    let mu = nu - steps as f64; // mu in [-1/2, 1/2]

    // (K_mu, K_{mu+1}), possibly scaled by e^x for the large-x branch.
    let (mut k_mu, mut k_mu1, mut log_scale) = if x <= 2.0 {
        let (a, b) = temme_series(mu, x)?;
        (a, b, 0.0)
    } else {
        let (a, b) = steed_cf2(mu, x)?;
        (a, b, -x)
    };

    // Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m, renormalizing to
    // avoid overflow at large orders.
    let xi2 = 2.0 / x;
    for i in 1..=steps {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
        if k_mu1 > RESCALE {
            k_mu /= RESCALE;
            k_mu1 /= RESCALE;
            log_scale += LN_RESCALE;
        }
    }
    // After `steps` iterations k_mu holds K_{mu + steps} = K_nu.
    Ok(k_mu.ln() + log_scale)
}

/// K_nu(x) directly; overflows to +inf for extreme order/argument pairs.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(log_bessel_k(nu, x)?.exp())
}

/// Temme's series for K_mu(x), K_{mu+1}(x) with |mu| <= 1/2 and x <= 2.
fn temme_series(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mu2 = mu * mu;
    let x2 = 0.5 * x;
    let pimu = std::f64::consts::PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };

    // 1/Gamma(1 +- mu) and the Temme coefficients; gam1 needs a series at
    // small mu because the direct difference cancels.
    let gampl = (-ln_gamma(1.0 + mu)).exp();
    let gammi = (-ln_gamma(1.0 - mu)).exp();
    let gam1 = if mu.abs() < 1e-4 {
        // gam1 = -euler_gamma - c4*mu^2 with c4 from the 1/Gamma(1+z) series.
        -0.577_215_664_901_532_9 + 0.042_002_635_034_095_24 * mu2
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    let gam2 = (gammi + gampl) / 2.0;

    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let e_exp = e.exp();
    let mut p = 0.5 * e_exp / gampl;
    let mut q = 0.5 / (e_exp * gammi);
    let mut c = 1.0;
    let dsq = x2 * x2;
    let mut sum1 = p;
    for i in 1..=MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dsq / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * EPS {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(Error::InvalidInput(format!(
        "Temme series for K_nu failed to converge at mu={mu}, x={x}"
    )))
}

/// Steed's CF2 for e^x K_mu(x), e^x K_{mu+1}(x) with |mu| <= 1/2 and x > 2.
fn steed_cf2(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = delh;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..=MAX_ITER {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::InvalidInput(format!(
            "CF2 for K_nu failed to converge at mu={mu}, x={x}"
        )));
    }
    h = a1 * h;
    // Scaled values: these are e^x K(x).
    let k_mu = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    Ok((k_mu, k_mu1))
}
