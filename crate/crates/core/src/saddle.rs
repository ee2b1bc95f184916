//! Saddle point of the bivariate generating function.
//!
//! For fixed `rho` the map `r -> -f10(r, rho)` decreases strictly from
//! infinity to zero, so `n = -f10` has one root `r(rho)`. The length
//! functional `S(rho) = f01(r(rho), rho)` increases strictly with
//! `S'(rho) = delta / f20`. Both roots are found by bracketing followed by
//! Newton steps that fall back to bisection whenever they leave the bracket.

use serde::Serialize;

use crate::boltzmann::{low_order, EvalPoint, LowOrder, DEFAULT_EPSILON};
use crate::error::{Error, Module, Result};
use crate::special::{gamma_fn, li_neg};
use crate::spectrum::PartSpectrum;

/// Default relative residual for both saddle equations.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Largest spectrum the solver grows on its own.
pub const DEFAULT_KMAX_CAP: u64 = 1 << 25;
/// Number of times the rho search interval may double.
const RHO_EXPANSIONS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Relative residual target.
    pub tolerance: f64,
    /// Relative tail tolerance of the series.
    pub epsilon: f64,
    pub max_iterations: u32,
    pub kmax_cap: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: DEFAULT_TOLERANCE,
            epsilon: DEFAULT_EPSILON,
            max_iterations: 200,
            kmax_cap: DEFAULT_KMAX_CAP,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 1e-15 && self.tolerance <= 1e-3) {
            return Err(Error::Domain {
                module: Module::Saddle,
                quantity: "tolerance",
                value: self.tolerance,
                what: "solver tolerance must lie in [1e-15, 1e-3]",
            });
        }
        Ok(())
    }
}

/// Solution of `n = -f10(r, rho)`, `m = f01(r, rho)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaddlePoint {
    pub n: u64,
    /// `None` when `rho` is pinned at zero.
    pub m: Option<u64>,
    pub r: f64,
    pub rho: f64,
    pub residual_n: f64,
    pub residual_m: Option<f64>,
    /// `B^2 = f20(r, rho)`.
    #[serde(rename = "B2")]
    pub big_b2: f64,
    /// `b^2 = f02 - f11^2 / f20`.
    pub b2: f64,
    pub delta: f64,
    /// `f(r, rho)`.
    pub f: f64,
    /// `S(rho) = f01(r, rho)`.
    pub s: f64,
}

impl SaddlePoint {
    fn from_low(n: u64, m: Option<u64>, r: f64, rho: f64, lo: &LowOrder) -> Self {
        SaddlePoint {
            n,
            m,
            r,
            rho,
            residual_n: (n as f64 + lo.f10).abs() / n as f64,
            residual_m: m.map(|m| (m as f64 - lo.f01).abs() / m as f64),
            big_b2: lo.f20,
            b2: lo.b2(),
            delta: lo.delta(),
            f: lo.f,
            s: lo.f01,
        }
    }

    /// `S'(rho) = delta / f20`.
    pub fn s_prime(&self) -> f64 {
        self.delta / self.big_b2
    }
}

/// Series evaluation that grows the spectrum when truncation demands it.
struct Evaluator<'a> {
    spectrum: &'a mut PartSpectrum,
    config: SolverConfig,
}

impl Evaluator<'_> {
    fn low_order(&mut self, r: f64, rho: f64) -> Result<LowOrder> {
        let pt = EvalPoint::new(r, rho).with_epsilon(self.config.epsilon);
        loop {
            match low_order(self.spectrum, &pt) {
                Ok(d) => return Ok(d),
                Err(Error::Truncation { needed, .. }) => {
                    if needed > self.config.kmax_cap {
                        return Err(Error::Guard {
                            module: Module::Saddle,
                            quantity: "kmax",
                            value: needed,
                            limit: self.config.kmax_cap,
                        });
                    }
                    self.spectrum.extend_to(needed)?;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Leading-term guess `(beta Gamma(beta+1) (-Li_{beta+1}(-e^rho)) / n)^(1/(beta+1))`.
fn initial_r(beta: f64, n: u64, rho: f64) -> f64 {
    let s = beta + 1.0;
    let log_li = if rho < -30.0 {
        rho
    } else {
        match li_neg(s, rho) {
            Ok(li) if li < 0.0 => (-li).ln(),
            _ => s * rho.max(1.0).ln() - gamma_fn(s + 1.0).map(f64::ln).unwrap_or(0.0),
        }
    };
    let log_gamma = gamma_fn(s).map(f64::ln).unwrap_or(0.0);
    let guess = ((beta.ln() + log_gamma + log_li - (n as f64).ln()) / s).exp();
    if guess.is_finite() && guess > 0.0 {
        guess
    } else {
        1.0
    }
}

fn solve_r_inner(ev: &mut Evaluator<'_>, n: u64, rho: f64, hint: Option<f64>) -> Result<(f64, LowOrder)> {
    let target = n as f64;
    let tol = ev.config.tolerance;
    let beta = ev.spectrum.alpha().beta();
    let mut u = hint.unwrap_or_else(|| initial_r(beta, n, rho)).ln();
    let mut lo = f64::NEG_INFINITY; // -f10 > n here
    let mut hi = f64::INFINITY; // -f10 < n here
    let mut last_err = f64::INFINITY;
    for _ in 0..ev.config.max_iterations {
        let r = u.exp();
        let d = ev.low_order(r, rho)?;
        let value = -d.f10;
        last_err = (value - target).abs() / target;
        if last_err <= tol {
            return Ok((r, d));
        }
        if value > target {
            lo = u;
        } else {
            hi = u;
        }
        if lo.is_infinite() {
            u -= std::f64::consts::LN_2;
            continue;
        }
        if hi.is_infinite() {
            u += std::f64::consts::LN_2;
            continue;
        }
        // Newton on ln(-f10) as a function of ln r.
        let slope = -r * d.f20 / value;
        let mut next = u - (value.ln() - target.ln()) / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if next == u {
            break;
        }
        u = next;
    }
    Err(Error::Convergence {
        module: Module::Saddle,
        quantity: "r",
        iterations: ev.config.max_iterations as usize,
        last_error: last_err,
    })
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(Module::Saddle, "n must be at least 1"));
    }
    Ok(())
}

/// Unique `r > 0` with `n = -f10(r, rho)`.
pub fn solve_r(n: u64, rho: f64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<f64> {
    check_n(n)?;
    config.validate()?;
    let mut ev = Evaluator {
        spectrum,
        config: *config,
    };
    Ok(solve_r_inner(&mut ev, n, rho, None)?.0)
}

/// `S(rho) = f01(r(rho), rho)`.
pub fn s_of_rho(n: u64, rho: f64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<f64> {
    Ok(saddle_at_rho(n, rho, spectrum, config)?.s)
}

/// Saddle quantities with `rho` held fixed and `r = r(rho)`.
pub fn saddle_at_rho(n: u64, rho: f64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<SaddlePoint> {
    check_n(n)?;
    config.validate()?;
    let mut ev = Evaluator {
        spectrum,
        config: *config,
    };
    let (r, d) = solve_r_inner(&mut ev, n, rho, None)?;
    Ok(SaddlePoint::from_low(n, None, r, rho, &d))
}

/// Solves the saddle system. With `m = None`, `rho = 0`.
pub fn solve_saddle(n: u64, m: Option<u64>, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<SaddlePoint> {
    check_n(n)?;
    config.validate()?;
    let Some(m) = m else {
        return saddle_at_rho(n, 0.0, spectrum, config);
    };
    let (_, upper) = m_range(n, spectrum)?;
    if m < 1 || m > upper {
        return Err(Error::Range {
            module: Module::Saddle,
            quantity: "m",
            value: m as f64,
            lo: 1.0,
            hi: upper as f64,
        });
    }
    let mut ev = Evaluator {
        spectrum,
        config: *config,
    };
    let target = m as f64;
    let tol = config.tolerance;
    let beta = ev.spectrum.alpha().beta();
    let base_limit = beta * (n as f64).ln() + 10.0;

    let (mut r, mut d) = solve_r_inner(&mut ev, n, 0.0, None)?;
    let mut rho = 0.0;
    if (d.f01 - target).abs() <= tol * target {
        return Ok(SaddlePoint::from_low(n, Some(m), r, rho, &d));
    }

    // Bracket outward from rho = 0 in growing steps.
    let up = d.f01 < target;
    let dir = if up { 1.0 } else { -1.0 };
    let mut inner = 0.0; // S on the near side of m
    let mut step = 1.0;
    let mut limit = base_limit;
    let mut expansions = 0;
    let outer;
    loop {
        let next = (rho.abs() + step).min(limit);
        let (r_next, d_next) = solve_r_inner(&mut ev, n, dir * next, Some(r))?;
        let crossed = if up { d_next.f01 >= target } else { d_next.f01 <= target };
        r = r_next;
        d = d_next;
        rho = dir * next;
        if (d.f01 - target).abs() <= tol * target {
            return Ok(SaddlePoint::from_low(n, Some(m), r, rho, &d));
        }
        if crossed {
            outer = rho;
            break;
        }
        inner = rho;
        step *= 2.0;
        if next >= limit {
            if expansions == RHO_EXPANSIONS {
                return Err(Error::Range {
                    module: Module::Saddle,
                    quantity: "m",
                    value: target,
                    lo: 1.0,
                    hi: d.f01,
                });
            }
            expansions += 1;
            limit *= 2.0;
        }
    }
    let (mut lo, mut hi) = if up { (inner, outer) } else { (outer, inner) };

    let mut last_err = f64::INFINITY;
    for _ in 0..config.max_iterations {
        let value = d.f01;
        last_err = (value - target).abs() / target;
        if last_err <= tol {
            return Ok(SaddlePoint::from_low(n, Some(m), r, rho, &d));
        }
        if value < target {
            lo = lo.max(rho);
        } else {
            hi = hi.min(rho);
        }
        let slope = d.delta() / d.f20;
        let mut next = rho - (value - target) / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if next == rho {
            break;
        }
        rho = next;
        let (r_next, d_next) = solve_r_inner(&mut ev, n, rho, Some(r))?;
        r = r_next;
        d = d_next;
    }
    Err(Error::Convergence {
        module: Module::Saddle,
        quantity: "rho",
        iterations: config.max_iterations as usize,
        last_error: last_err,
    })
}

/// `(mu_n, sigma_n^2)` with `mu_n = S(0)` and `sigma_n^2 = b^2` at `(r(0), 0)`.
pub fn mean_variance(n: u64, spectrum: &mut PartSpectrum, config: &SolverConfig) -> Result<(f64, f64)> {
    let sp = saddle_at_rho(n, 0.0, spectrum, config)?;
    Ok((sp.s, sp.b2))
}

/// `(1, M)` where `M` is the largest length of any partition of `n`: the
/// number of smallest part values (value `k` available `g(k)` times) whose
/// sum stays within `n`.
pub fn m_range(n: u64, spectrum: &mut PartSpectrum) -> Result<(u64, u64)> {
    check_n(n)?;
    if spectrum.kmax() < n {
        spectrum.extend_to(n)?;
    }
    let mut remaining = n;
    let mut count = 0u64;
    for k in 1..=n {
        if remaining < k {
            break;
        }
        let take = spectrum.g(k).min(remaining / k);
        count += take;
        remaining -= take * k;
        if take < spectrum.g(k) {
            break;
        }
    }
    Ok((1, count))
}
