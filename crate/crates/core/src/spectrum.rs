//! Part multiplicities `g(k) = #{a >= 1 : floor(a^alpha) = k}`.
//!
//! Since `floor(a^alpha) = k` exactly when `k^beta <= a < (k+1)^beta`, the
//! multiplicity is a difference of two ceilings, `ceil((k+1)^beta) - ceil(k^beta)`.
//! For rational `alpha = p/q` the ceiling `ceil(k^(q/p))` is the least integer
//! `t` with `t^p >= k^q` and is found by an integer binary search. Real
//! exponents go through 256-bit floating point and every ceiling is
//! certified against a one-ulp perturbation at 200 bits. A decimal literal is
//! converted at full working precision, so `0.7` means seven tenths rather
//! than the nearest binary64.

use std::fmt;
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Module, Result};

/// Bits carried by the extended-precision evaluation of `k^beta`.
pub const WORK_BITS: usize = 256;
/// Precision at which a real-exponent ceiling must be stable.
pub const CERT_BITS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum AlphaKind {
    /// `alpha = p/q` in lowest terms, `0 < p < q`.
    Rational { p: u32, q: u32 },
    /// A real exponent. `literal` keeps the decimal text it was parsed from;
    /// without it the binary64 `value` is taken at face value.
    Real { value: f64, literal: Option<String> },
}

/// The exponent `alpha` in `(0, 1)` together with `beta = 1/alpha`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaParam {
    kind: AlphaKind,
    alpha: f64,
    beta: f64,
}

impl AlphaParam {
    pub fn rational(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::invalid(
                Module::PartSpectrum,
                format!("alpha = {p}/{q} needs a positive numerator and denominator"),
            ));
        }
        let d = p.gcd(&q);
        let (p, q) = (p / d, q / d);
        if p >= q {
            return Err(Error::invalid(
                Module::PartSpectrum,
                format!("alpha = {p}/{q} is not in (0, 1)"),
            ));
        }
        Ok(AlphaParam {
            kind: AlphaKind::Rational { p, q },
            alpha: p as f64 / q as f64,
            beta: q as f64 / p as f64,
        })
    }

    pub fn real(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::invalid(
                Module::PartSpectrum,
                format!("alpha = {value} is not in (0, 1)"),
            ));
        }
        Ok(AlphaParam {
            kind: AlphaKind::Real { value, literal: None },
            alpha: value,
            beta: 1.0 / value,
        })
    }

    pub fn kind(&self) -> &AlphaKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, AlphaKind::Rational { .. })
    }

    /// Numerator and denominator when the exponent is rational.
    pub fn as_ratio(&self) -> Option<(u32, u32)> {
        match self.kind {
            AlphaKind::Rational { p, q } => Some((p, q)),
            AlphaKind::Real { .. } => None,
        }
    }
}

impl FromStr for AlphaParam {
    type Err = Error;

    /// Accepts `p/q` (exact) or a decimal literal (real).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let parse = |t: &str| {
                t.trim().parse::<u32>().map_err(|_| {
                    Error::invalid(Module::PartSpectrum, format!("cannot parse alpha '{s}'"))
                })
            };
            AlphaParam::rational(parse(num)?, parse(den)?)
        } else {
            let value: f64 = s.parse().map_err(|_| {
                Error::invalid(Module::PartSpectrum, format!("cannot parse alpha '{s}'"))
            })?;
            let mut alpha = AlphaParam::real(value)?;
            alpha.kind = AlphaKind::Real {
                value,
                literal: Some(s.to_string()),
            };
            Ok(alpha)
        }
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AlphaKind::Rational { p, q } => write!(f, "{p}/{q}"),
            AlphaKind::Real { literal: Some(text), .. } => write!(f, "{text}"),
            AlphaKind::Real { value, .. } => write!(f, "{value}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Exactness {
    Exact,
    PrecisionCertified,
}

/// Table of `g(1..=kmax)`.
#[derive(Clone, Debug)]
pub struct PartSpectrum {
    alpha: AlphaParam,
    g: Vec<u64>,
    exactness: Exactness,
}

impl PartSpectrum {
    /// Wraps an externally produced table without any checks.
    pub fn from_raw(alpha: AlphaParam, g: Vec<u64>, exactness: Exactness) -> Self {
        PartSpectrum { alpha, g, exactness }
    }

    pub fn alpha(&self) -> &AlphaParam {
        &self.alpha
    }

    pub fn kmax(&self) -> u64 {
        self.g.len() as u64
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// `g(k)` for `1 <= k <= kmax`.
    #[inline]
    pub fn g(&self, k: u64) -> u64 {
        self.g[(k - 1) as usize]
    }

    /// Multiplicities as a slice; index 0 holds `g(1)`.
    pub fn values(&self) -> &[u64] {
        &self.g
    }

    /// Grows the table to at least `kmax` entries.
    pub fn extend_to(&mut self, kmax: u64) -> Result<()> {
        if kmax <= self.kmax() {
            return Ok(());
        }
        let mut ceiling = CeilingEngine::new(&self.alpha);
        let start = self.kmax() + 1;
        let mut prev = ceiling.ceil_pow(start)?;
        for k in start..=kmax {
            let next = ceiling.ceil_pow(k + 1)?;
            self.g.push(difference(&next, &prev, k)?);
            prev = next;
        }
        check_telescoping(self, &mut ceiling)
    }
}

/// `ceil(k^beta)` for one exponent, reusing high-precision state.
struct CeilingEngine {
    mode: CeilMode,
}

#[allow(clippy::large_enum_variant)]
enum CeilMode {
    Rational { p: u32, q: u32 },
    Real { beta: BigFloat, consts: Consts },
}

impl CeilingEngine {
    fn new(alpha: &AlphaParam) -> Self {
        let mode = match alpha.kind {
            AlphaKind::Rational { p, q } => CeilMode::Rational { p, q },
            AlphaKind::Real { value, ref literal } => {
                let mut consts = Consts::new().expect("astro-float constant cache");
                let parsed = literal
                    .as_deref()
                    .map(|t| BigFloat::parse(t, Radix::Dec, WORK_BITS, RoundingMode::ToEven, &mut consts))
                    .filter(|x| !x.is_nan());
                let a = parsed.unwrap_or_else(|| BigFloat::from_f64(value, WORK_BITS));
                let beta = BigFloat::from_u64(1, WORK_BITS).div(&a, WORK_BITS, RoundingMode::ToEven);
                CeilMode::Real { beta, consts }
            }
        };
        CeilingEngine { mode }
    }

    fn ceil_pow(&mut self, k: u64) -> Result<BigUint> {
        match &mut self.mode {
            CeilMode::Rational { p, q } => Ok(ceil_pow_rational(k, *p, *q)),
            CeilMode::Real { beta, consts } => {
                if k == 1 {
                    return Ok(BigUint::one());
                }
                let (c, ambiguous) = ceil_pow_float(beta, k, consts);
                if ambiguous {
                    Err(Error::PrecisionAmbiguous {
                        module: Module::PartSpectrum,
                        k,
                    })
                } else {
                    Ok(c)
                }
            }
        }
    }
}

/// Least integer `t` with `t^p >= k^q`, i.e. `ceil(k^(q/p))`.
pub fn ceil_pow_rational(k: u64, p: u32, q: u32) -> BigUint {
    if let Some(x) = (k as u128).checked_pow(q) {
        return BigUint::from(ceil_root_u128(x, p));
    }
    let x = BigUint::from(k).pow(q);
    ceil_root_big(&x, p)
}

fn ceil_root_u128(x: u128, p: u32) -> u128 {
    if p == 1 || x <= 1 {
        return x;
    }
    // hi^p >= x because hi >= 2^(bits/p).
    let bits = 128 - x.leading_zeros();
    let mut lo: u128 = 0;
    let mut hi: u128 = 1u128 << (bits.div_ceil(p));
    // Invariant: lo^p < x <= hi^p.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match mid.checked_pow(p) {
            Some(v) if v < x => lo = mid,
            _ => hi = mid,
        }
    }
    hi
}

fn ceil_root_big(x: &BigUint, p: u32) -> BigUint {
    if p == 1 || x <= &BigUint::one() {
        return x.clone();
    }
    let bits = x.bits();
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one() << bits.div_ceil(p as u64);
    let one = BigUint::one();
    while &hi - &lo > one {
        let mid = (&lo + &hi) >> 1u32;
        if mid.pow(p) < *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `ceil(k^beta)` from a 256-bit evaluation. The flag reports whether a
/// relative perturbation of `2^-CERT_BITS` moves the ceiling, in which case
/// the value returned is the ceiling of the nearest integer.
pub fn ceil_pow_float(beta: &BigFloat, k: u64, consts: &mut Consts) -> (BigUint, bool) {
    let rm = RoundingMode::ToEven;
    let base = BigFloat::from_u64(k, WORK_BITS);
    let y = base.pow(beta, WORK_BITS, rm, consts);
    let mut delta = y.clone();
    let e = delta.exponent().unwrap_or(0);
    delta.set_exponent(e - CERT_BITS as i32);
    let lo = y.sub(&delta, WORK_BITS, rm).ceil();
    let hi = y.add(&delta, WORK_BITS, rm).ceil();
    let lo_int = bigfloat_to_biguint(&lo);
    let hi_int = bigfloat_to_biguint(&hi);
    if lo_int == hi_int {
        (lo_int, false)
    } else {
        // y sits within one certification ulp of the integer lo_int.
        (lo_int, true)
    }
}

/// Converts a non-negative integral `BigFloat` to an integer.
fn bigfloat_to_biguint(x: &BigFloat) -> BigUint {
    if x.is_zero() {
        return BigUint::zero();
    }
    let (words, nbits, sign, exp, _) = x.as_raw_parts().expect("finite value");
    debug_assert_eq!(sign, Sign::Pos);
    if exp <= 0 {
        return BigUint::zero();
    }
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        digits.push(*w as u32);
        digits.push((*w >> 32) as u32);
    }
    let mantissa = BigUint::new(digits);
    let exp = exp as usize;
    if exp >= nbits {
        mantissa << (exp - nbits)
    } else {
        mantissa >> (nbits - exp)
    }
}

fn difference(next: &BigUint, prev: &BigUint, k: u64) -> Result<u64> {
    if next < prev {
        return Err(Error::invalid(
            Module::PartSpectrum,
            format!("ceilings decrease at k = {k}"),
        ));
    }
    (next - prev).to_u64().ok_or(Error::Guard {
        module: Module::PartSpectrum,
        quantity: "g(k)",
        value: k,
        limit: u64::MAX,
    })
}

/// `g(k) = ceil((k+1)^beta) - ceil(k^beta)`.
pub fn g_of_k(alpha: &AlphaParam, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::invalid(Module::PartSpectrum, "g(k) needs k >= 1"));
    }
    let mut engine = CeilingEngine::new(alpha);
    let lo = engine.ceil_pow(k)?;
    let hi = engine.ceil_pow(k + 1)?;
    difference(&hi, &lo, k)
}

/// Builds `g(1..=kmax)` and verifies the telescoping identity
/// `sum g(k) = ceil((kmax+1)^beta) - 1` before returning.
pub fn build_spectrum(alpha: &AlphaParam, kmax: u64) -> Result<PartSpectrum> {
    if kmax == 0 {
        return Err(Error::invalid(Module::PartSpectrum, "kmax must be >= 1"));
    }
    let exactness = if alpha.is_exact() {
        Exactness::Exact
    } else {
        Exactness::PrecisionCertified
    };
    let mut spectrum = PartSpectrum {
        alpha: alpha.clone(),
        g: Vec::with_capacity(kmax as usize),
        exactness,
    };
    spectrum.extend_to(kmax)?;
    Ok(spectrum)
}

fn check_telescoping(spectrum: &PartSpectrum, engine: &mut CeilingEngine) -> Result<()> {
    let total: u128 = spectrum.g.iter().map(|&g| g as u128).sum();
    let top = engine.ceil_pow(spectrum.kmax() + 1)?;
    if BigUint::from(total) + BigUint::one() != top {
        return Err(Error::invalid(
            Module::PartSpectrum,
            format!(
                "telescoping check failed at kmax = {}: sum g = {total}, ceil((kmax+1)^beta) = {top}",
                spectrum.kmax()
            ),
        ));
    }
    Ok(())
}

/// Strict order bounds `(beta-1) k^(beta-1) < g(k) < beta 2^beta k^(beta-1)`
/// for every tabulated `k`.
pub fn check_order_bounds(spectrum: &PartSpectrum) -> bool {
    let beta = spectrum.alpha.beta();
    let upper_coef = beta * 2f64.powf(beta);
    spectrum.g.iter().enumerate().all(|(i, &g)| {
        let k = (i + 1) as f64;
        let scale = k.powf(beta - 1.0);
        let g = g as f64;
        (beta - 1.0) * scale < g && g < upper_coef * scale
    })
}

/// Upper bound `beta 2^beta k^(beta-1)` on `g(k)` as `(coefficient, exponent)`.
pub fn order_upper_bound(alpha: &AlphaParam) -> (f64, f64) {
    let beta = alpha.beta();
    (beta * 2f64.powf(beta), beta - 1.0)
}

/// `ceil(k^(q/p))` through the 256-bit floating path, for cross-checking the
/// integer path. Near-integer powers snap to the nearest integer.
pub fn ceil_pow_float_rational(k: u64, p: u32, q: u32, consts: &mut Consts) -> BigUint {
    let rm = RoundingMode::ToEven;
    let beta = BigFloat::from_u64(q as u64, WORK_BITS).div(
        &BigFloat::from_u64(p as u64, WORK_BITS),
        WORK_BITS,
        rm,
    );
    ceil_pow_float(&beta, k, consts).0
}
