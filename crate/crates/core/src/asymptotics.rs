//! Saddle-point main terms for `q(n)`, `q(n, m)` and the law of the length.
//!
//! Everything is assembled in log space; `exp` is taken only for outputs
//! that are probabilities.

use serde::Serialize;

use crate::error::{Error, Module, Result};
use crate::estimate::{AsymptoticEstimate, Provenance};
use crate::exact::ExactTable;
use crate::saddle::{mean_variance, solve_saddle, SaddlePoint, SolverConfig};
use crate::special::normal_cdf;
use crate::spectrum::PartSpectrum;

const LN_2PI: f64 = 1.837_877_066_409_345_5;
/// Relative tolerance of the `L_n e^{H_n}` identity check.
pub const RATIO_IDENTITY_TOLERANCE: f64 = 1e-12;

fn count_error_scale(sp: &SaddlePoint, beta: f64) -> f64 {
    sp.r.powf(2.0 * beta / 7.0)
}

/// `ln q(n) ~ n r + f(r, 0) - ln(2 pi)/2 - ln B` at the centred saddle.
pub fn qn_from_saddle(centre: &SaddlePoint, beta: f64) -> AsymptoticEstimate {
    let log = centre.n as f64 * centre.r + centre.f - 0.5 * LN_2PI - 0.5 * centre.big_b2.ln();
    AsymptoticEstimate::from_log(log, count_error_scale(centre, beta), Provenance::PartitionCount)
}

/// `ln q(n, m) ~ -m rho + n r + f - ln(2 pi) - ln B - ln b` at the saddle of `(n, m)`.
pub fn qnm_from_saddle(sp: &SaddlePoint, beta: f64) -> Result<AsymptoticEstimate> {
    let m = sp
        .m
        .ok_or_else(|| Error::invalid(Module::Asymptotics, "q(n, m) needs a saddle solved for m"))?;
    let log = -(m as f64) * sp.rho + sp.n as f64 * sp.r + sp.f
        - LN_2PI
        - 0.5 * sp.big_b2.ln()
        - 0.5 * sp.b2.ln();
    Ok(AsymptoticEstimate::from_log(log, count_error_scale(sp, beta), Provenance::LengthCount))
}

pub fn qn_asymptotic(n: u64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<AsymptoticEstimate> {
    let beta = spectrum.alpha().beta();
    let centre = solve_saddle(n, None, spectrum, config)?;
    Ok(qn_from_saddle(&centre, beta))
}

pub fn qnm_asymptotic(n: u64, m: u64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<AsymptoticEstimate> {
    let beta = spectrum.alpha().beta();
    let sp = solve_saddle(n, Some(m), spectrum, config)?;
    qnm_from_saddle(&sp, beta)
}

/// Gaussian local approximation of `P(length = m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianLlt {
    pub probability: f64,
    /// `(m - mu_n) / sigma_n`.
    pub x: f64,
    pub mu: f64,
    pub sigma: f64,
    /// `(|x| + |x|^3) / n^(alpha / (2 alpha + 2))`.
    pub error_scale: f64,
}

/// Gaussian density at `x = (m - mu)/sigma` for given moments.
pub fn gaussian_from_moments(n: u64, m: u64, mu: f64, sigma2: f64, alpha: f64) -> Result<GaussianLlt> {
    if !(sigma2 > 0.0) {
        return Err(Error::Domain {
            module: Module::Asymptotics,
            quantity: "sigma_n^2",
            value: sigma2,
            what: "the local limit density needs sigma_n > 0",
        });
    }
    let sigma = sigma2.sqrt();
    let x = (m as f64 - mu) / sigma;
    let ax = x.abs();
    Ok(GaussianLlt {
        probability: (-0.5 * x * x - 0.5 * LN_2PI).exp() / sigma,
        x,
        mu,
        sigma,
        error_scale: (ax + ax * ax * ax) / (n as f64).powf(alpha / (2.0 * alpha + 2.0)),
    })
}

pub fn llt_gaussian_prob(n: u64, m: u64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<GaussianLlt> {
    let alpha = spectrum.alpha().alpha();
    let (mu, sigma2) = mean_variance(n, spectrum, config)?;
    gaussian_from_moments(n, m, mu, sigma2, alpha)
}

/// `P(length = m) ~ L_n e^{H_n}` from the centred saddle and the saddle of `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioLlt {
    pub probability: f64,
    /// `ln L_n`.
    pub log_l: f64,
    pub h: f64,
    pub rho: f64,
}

pub fn ratio_from_saddles(centre: &SaddlePoint, sp: &SaddlePoint, beta: f64) -> Result<RatioLlt> {
    let m = sp
        .m
        .ok_or_else(|| Error::invalid(Module::Asymptotics, "ratio form needs a saddle solved for m"))?;
    let log_l = 0.5 * centre.big_b2.ln() - 0.5 * LN_2PI - 0.5 * sp.big_b2.ln() - 0.5 * sp.b2.ln();
    let n = sp.n as f64;
    let h = -(m as f64) * sp.rho + n * sp.r + sp.f - n * centre.r - centre.f;
    let probability = (log_l + h).exp();

    let quotient = (qnm_from_saddle(sp, beta)?.log_value - qn_from_saddle(centre, beta).log_value).exp();
    let deviation = (probability - quotient).abs();
    if deviation > RATIO_IDENTITY_TOLERANCE * quotient.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Convergence {
            module: Module::Asymptotics,
            quantity: "L_n e^H_n identity",
            iterations: 0,
            last_error: deviation / quotient,
        });
    }
    Ok(RatioLlt {
        probability,
        log_l,
        h,
        rho: sp.rho,
    })
}

pub fn llt_ratio_prob(n: u64, m: u64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<RatioLlt> {
    let beta = spectrum.alpha().beta();
    let centre = solve_saddle(n, None, spectrum, config)?;
    let sp = solve_saddle(n, Some(m), spectrum, config)?;
    ratio_from_saddles(&centre, &sp, beta)
}

/// `sup_x |P((L - mu)/sigma <= x) - Phi(x)|` over both one-sided limits at
/// every atom.
pub fn cdf_distance_from_moments(table: &ExactTable, mu: f64, sigma2: f64) -> f64 {
    let sigma = sigma2.sqrt();
    let mut below = 0.0;
    let mut worst: f64 = 0.0;
    for m in 0..=table.max_length() {
        let p = table.probability(m);
        let phi = normal_cdf((m as f64 - mu) / sigma);
        let upto = below + p;
        worst = worst.max((below - phi).abs()).max((upto - phi).abs());
        below = upto;
    }
    worst.min(1.0)
}

/// Kolmogorov distance between the exact law of the centred, scaled length
/// and the standard normal, using the saddle moments.
pub fn clt_cdf_distance(table: &ExactTable, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<f64> {
    let (mu, sigma2) = mean_variance(table.n, spectrum, config)?;
    Ok(cdf_distance_from_moments(table, mu, sigma2))
}
