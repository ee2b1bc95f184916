//! The log generating function `f(r, rho) = sum_k g(k) ln(1 + e^(rho - k r))`
//! and its mixed partials on the real slice.
//!
//! Every `f_{pq}` is a sum of `g(k) (-k)^p L^{(p+q)}(rho - k r)` with
//! `L(y) = ln(1 + e^y)`. The derivatives of `L` are polynomials in the
//! logistic function, which keeps all orders exact for either sign of `y`.
//!
//! Truncation starts at `K0 = ceil(20/r)` and doubles until the last ten
//! terms and an analytic tail bound are both below `epsilon * |partial sum|`.
//! The tail bound uses `g(k) < beta 2^beta k^(beta-1)`, `|L^{(j)}(y)| <= e^y`
//! for `y <= 0`, and geometric domination of `k^a e^(-k r)`.

use crate::error::{Error, Module, Result};
use crate::estimate::{AsymptoticEstimate, Provenance};
use crate::spectrum::{order_upper_bound, AlphaParam, PartSpectrum};
use crate::special::{gamma_fn, gen_binomial, li_neg};

/// Default relative tail bound for series evaluation.
pub const DEFAULT_EPSILON: f64 = 1e-12;
/// Highest total derivative order supported.
pub const MAX_ORDER: u32 = 4;
/// Cap on truncation length for weights with no table (`h` sums).
const HARMONIC_KMAX: u64 = 1 << 28;

/// A point `(r, rho)` on the real slice with a relative tail tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    pub r: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl EvalPoint {
    pub fn new(r: f64, rho: f64) -> Self {
        EvalPoint {
            r,
            rho,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::Domain {
                module: Module::Boltzmann,
                quantity: "r",
                value: self.r,
                what: "series need r > 0",
            });
        }
        if !self.rho.is_finite() {
            return Err(Error::Domain {
                module: Module::Boltzmann,
                quantity: "rho",
                value: self.rho,
                what: "rho must be finite",
            });
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1e-6) {
            return Err(Error::Domain {
                module: Module::Boltzmann,
                quantity: "epsilon",
                value: self.epsilon,
                what: "epsilon must lie in (0, 1e-6]",
            });
        }
        Ok(())
    }
}

/// Order `(p, q)` of `d^(p+q) f / d tau^p d sigma^q`, with `p + q <= 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartialIndex {
    p: u32,
    q: u32,
}

impl PartialIndex {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p + q > MAX_ORDER {
            return Err(Error::invalid(
                Module::Boltzmann,
                format!("partial order p+q = {} exceeds {MAX_ORDER}", p + q),
            ));
        }
        Ok(PartialIndex { p, q })
    }

    pub const fn value() -> Self {
        PartialIndex { p: 0, q: 0 }
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn order(self) -> u32 {
        self.p + self.q
    }
}

/// `[L, L', L'', L''', L'''']` for `L(y) = ln(1 + e^y)`.
#[inline]
pub fn softplus_derivatives(y: f64) -> [f64; 5] {
    let (value, s, c) = if y > 0.0 {
        let e = (-y).exp();
        (y + e.ln_1p(), 1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = y.exp();
        (e.ln_1p(), e / (1.0 + e), 1.0 / (1.0 + e))
    };
    let sc = s * c;
    [value, s, sc, sc * (c - s), sc * (1.0 - 6.0 * sc)]
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Multiplicity source for the series engine.
trait Weights {
    fn weight(&self, k: u64) -> f64;
    /// `(C, a)` with `weight(k) <= C k^a` for every `k`.
    fn bound(&self) -> (f64, f64);
    fn kmax(&self) -> u64;
}

impl Weights for PartSpectrum {
    #[inline]
    fn weight(&self, k: u64) -> f64 {
        self.g(k) as f64
    }
    fn bound(&self) -> (f64, f64) {
        order_upper_bound(self.alpha())
    }
    fn kmax(&self) -> u64 {
        PartSpectrum::kmax(self)
    }
}

struct PowerWeights {
    gamma: f64,
}

impl Weights for PowerWeights {
    #[inline]
    fn weight(&self, k: u64) -> f64 {
        (k as f64).powf(self.gamma)
    }
    fn bound(&self) -> (f64, f64) {
        (1.0, self.gamma)
    }
    fn kmax(&self) -> u64 {
        HARMONIC_KMAX
    }
}

/// `ln` of the analytic bound on `sum_{k > K} C k^(a+p) e^(rho - k r)`, or
/// `None` when geometric domination does not hold yet at `K`.
fn log_tail_bound(c: f64, a: f64, p: u32, r: f64, rho: f64, k_end: u64) -> Option<f64> {
    let next = (k_end + 1) as f64;
    if next * r < rho {
        return None;
    }
    let expo = a + p as f64;
    let ratio = (expo * (1.0 + 1.0 / next).ln() - r).exp();
    if ratio >= 1.0 {
        return None;
    }
    Some(c.ln() + expo.max(0.0) * next.ln() + rho - next * r - (1.0 - ratio).ln())
}

fn sum_partials<W: Weights>(w: &W, pt: &EvalPoint, indices: &[PartialIndex]) -> Result<Vec<f64>> {
    pt.validate()?;
    let (c, a) = w.bound();
    let mut acc = vec![Accumulator::default(); indices.len()];
    // |term| for the most recent ten k, per index.
    let mut recent = vec![[0.0f64; 10]; indices.len()];
    let mut k_end = ((20.0 / pt.r).ceil() as u64).max(10);
    let mut done = 0u64;
    loop {
        if k_end > w.kmax() {
            return Err(Error::Truncation {
                module: Module::Boltzmann,
                needed: k_end,
                available: w.kmax(),
            });
        }
        for k in done + 1..=k_end {
            let kf = k as f64;
            let d = softplus_derivatives(pt.rho - kf * pt.r);
            let wk = w.weight(k);
            for (i, idx) in indices.iter().enumerate() {
                let mut term = wk * d[idx.order() as usize];
                for _ in 0..idx.p {
                    term *= -kf;
                }
                acc[i].add(term);
                recent[i][(k % 10) as usize] = term.abs();
            }
        }
        done = k_end;
        let converged = indices.iter().enumerate().all(|(i, idx)| {
            let s = acc[i].total().abs();
            let limit = pt.epsilon * s;
            let last_ok = recent[i].iter().all(|&t| t <= limit);
            let tail_ok = match log_tail_bound(c, a, idx.p, pt.r, pt.rho, k_end) {
                Some(lt) => lt.exp() <= limit,
                None => false,
            };
            last_ok && tail_ok
        });
        if converged {
            return Ok(acc.iter().map(Accumulator::total).collect());
        }
        k_end = k_end.saturating_mul(2);
    }
}

/// `f(r, rho)`.
pub fn f_value(spectrum: &PartSpectrum, pt: &EvalPoint) -> Result<f64> {
    Ok(sum_partials(spectrum, pt, &[PartialIndex::value()])?[0])
}

/// One partial `f_{pq}(r, rho)`.
pub fn f_partial(spectrum: &PartSpectrum, pt: &EvalPoint, idx: PartialIndex) -> Result<f64> {
    Ok(sum_partials(spectrum, pt, &[idx])?[0])
}

/// Several partials from a single pass over `k`.
pub fn f_partials(spectrum: &PartSpectrum, pt: &EvalPoint, indices: &[PartialIndex]) -> Result<Vec<f64>> {
    sum_partials(spectrum, pt, indices)
}

/// `f` and all partials of order one and two at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowOrder {
    pub f: f64,
    pub f10: f64,
    pub f01: f64,
    pub f20: f64,
    pub f11: f64,
    pub f02: f64,
}

impl LowOrder {
    /// Hessian determinant `f20 f02 - f11^2`.
    pub fn delta(&self) -> f64 {
        self.f20 * self.f02 - self.f11 * self.f11
    }

    /// `f02 - f11^2 / f20`.
    pub fn b2(&self) -> f64 {
        self.delta() / self.f20
    }
}

const LOW_ORDER: [PartialIndex; 6] = [
    PartialIndex { p: 0, q: 0 },
    PartialIndex { p: 1, q: 0 },
    PartialIndex { p: 0, q: 1 },
    PartialIndex { p: 2, q: 0 },
    PartialIndex { p: 1, q: 1 },
    PartialIndex { p: 0, q: 2 },
];

pub fn low_order(spectrum: &PartSpectrum, pt: &EvalPoint) -> Result<LowOrder> {
    let v = sum_partials(spectrum, pt, &LOW_ORDER)?;
    Ok(LowOrder {
        f: v[0],
        f10: v[1],
        f01: v[2],
        f20: v[3],
        f11: v[4],
        f02: v[5],
    })
}

/// Pure-power analogue `h_{gamma,p,q}(r, rho)` of `f_{pq}` with `k^gamma`
/// in place of `g(k)`.
pub fn h_value(gamma: f64, p: u32, q: u32, r: f64, rho: f64, epsilon: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain {
            module: Module::Boltzmann,
            quantity: "gamma",
            value: gamma,
            what: "harmonic sums need gamma > 0",
        });
    }
    let idx = PartialIndex::new(p, q)?;
    let pt = EvalPoint { r, rho, epsilon };
    Ok(sum_partials(&PowerWeights { gamma }, &pt, &[idx])?[0])
}

/// Main term `(-1)^(p+1) Li_{gamma+2-q}(-e^rho) Gamma(gamma+p+1) r^-(gamma+p+1)`
/// of `h_{gamma,p,q}` as `r -> 0+`, with error scale `r^(-1/2)`.
pub fn h_asymptotic(gamma: f64, p: u32, q: u32, r: f64, rho: f64) -> Result<AsymptoticEstimate> {
    if !(gamma > 0.0) {
        return Err(Error::Domain {
            module: Module::Boltzmann,
            quantity: "gamma",
            value: gamma,
            what: "harmonic sums need gamma > 0",
        });
    }
    let order = gamma + 2.0 - q as f64;
    if order <= 0.0 {
        return Err(Error::OrderOutOfRange {
            module: Module::Boltzmann,
            order,
            nu: 0,
        });
    }
    let value = harmonic_main(gamma, p, q, r, rho)?;
    Ok(AsymptoticEstimate::from_value(
        value,
        r.powf(-0.5),
        Provenance::HarmonicSumMain,
    ))
}

fn harmonic_main(gamma: f64, p: u32, q: u32, r: f64, rho: f64) -> Result<f64> {
    let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
    let li = li_neg(gamma + 2.0 - q as f64, rho)?;
    let expo = gamma + p as f64 + 1.0;
    Ok(sign * li * gamma_fn(expo)? * r.powf(-expo))
}

/// Main sum of `f_{pq}` as `r -> 0+`:
/// `(-1)^(p+1) sum_{nu=1}^{ceil(beta-1)} C(beta,nu) Li_{beta-nu+2-q}(-e^rho)
/// Gamma(beta-nu+p+1) r^-(beta-nu+p+1)`, error scale `r^-(p+1/2)`.
pub fn f_partial_asymptotic(
    alpha: &AlphaParam,
    p: u32,
    q: u32,
    r: f64,
    rho: f64,
) -> Result<AsymptoticEstimate> {
    PartialIndex::new(p, q)?;
    let beta = alpha.beta();
    let top = (beta - 1.0).ceil() as u32;
    let mut total = 0.0;
    for nu in 1..=top {
        let gamma = beta - nu as f64;
        let order = gamma + 2.0 - q as f64;
        if order <= 0.0 {
            return Err(Error::OrderOutOfRange {
                module: Module::Boltzmann,
                order,
                nu,
            });
        }
        total += gen_binomial(beta, nu) * harmonic_main(gamma, p, q, r, rho)?;
    }
    Ok(AsymptoticEstimate::from_value(
        total,
        r.powf(-(p as f64 + 0.5)),
        Provenance::DerivativeMain,
    ))
}
