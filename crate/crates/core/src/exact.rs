//! Exact counts `q(n, m)` from the product `prod_k (1 + u z^k)^g(k)`.
//!
//! The DP keeps one row per degree `z <= N`, each holding the coefficients
//! of `u^0..u^M(z)` as fixed-width little-endian `u64` limbs. Coefficients
//! of a partial product never exceed the final ones, and
//! `ln q(z) <= z r + f(r, 0)` for every `r > 0`, so each row's width is fixed
//! up front from that bound. A carry out of the top limb is still checked.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::boltzmann::{f_value, EvalPoint};
use crate::error::{Error, Module, Result};
use crate::spectrum::{build_spectrum, AlphaKind, AlphaParam, PartSpectrum};

/// Largest `n` accepted by default.
pub const DEFAULT_CEILING: u64 = 4000;
/// Largest `n` for the brute-force oracle.
pub const BRUTE_FORCE_LIMIT: u64 = 30;

/// `q(n, m)` for every `m` together with `q(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactTable {
    pub alpha: AlphaParam,
    pub n: u64,
    /// `counts[m] = q(n, m)`; the last index is the maximal length.
    pub counts: Vec<BigUint>,
    pub total: BigUint,
}

impl ExactTable {
    fn from_counts(alpha: AlphaParam, n: u64, counts: Vec<BigUint>) -> Self {
        let total = counts.iter().sum();
        ExactTable {
            alpha,
            n,
            counts,
            total,
        }
    }

    /// `q(n, m)`, zero beyond the stored range.
    pub fn count(&self, m: u64) -> BigUint {
        self.counts.get(m as usize).cloned().unwrap_or_default()
    }

    /// Largest index stored; equals the maximal partition length.
    pub fn max_length(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    /// `ln q(n, m) - ln q(n)`, or `-inf` for an empty class.
    pub fn log_probability(&self, m: u64) -> f64 {
        ln_biguint(&self.count(m)) - ln_biguint(&self.total)
    }

    pub fn probability(&self, m: u64) -> f64 {
        self.log_probability(m).exp()
    }

    /// True when `{m : q(n, m) > 0}` is an interval.
    pub fn support_is_contiguous(&self) -> bool {
        let nonzero: Vec<usize> = (0..self.counts.len()).filter(|&m| !self.counts[m].is_zero()).collect();
        match (nonzero.first(), nonzero.last()) {
            (Some(&a), Some(&b)) => b - a + 1 == nonzero.len(),
            _ => true,
        }
    }
}

/// The law of the length of a uniform partition of `n`, in exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionView {
    pub n: u64,
    /// `probabilities[m] = q(n, m) / q(n)`.
    pub probabilities: Vec<BigRational>,
    pub mean: BigRational,
    pub variance: BigRational,
}

impl DistributionView {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::NAN)
    }

    pub fn variance_f64(&self) -> f64 {
        self.variance.to_f64().unwrap_or(f64::NAN)
    }
}

/// Natural log of a nonnegative big integer from its bit length and leading
/// 64 bits; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().expect("fits in 64 bits") as f64).ln();
    }
    let shift = bits - 64;
    let lead = (x >> shift).to_u64().expect("64 leading bits") as f64;
    lead.ln() + shift as f64 * std::f64::consts::LN_2
}

fn rational_alpha(alpha: &AlphaParam) -> Result<(u32, u32)> {
    match alpha.kind() {
        AlphaKind::Rational { p, q } => Ok((*p, *q)),
        AlphaKind::Real { .. } => Err(Error::invalid(
            Module::ExactCount,
            format!("exact counts need a rational alpha p/q, got {alpha}"),
        )),
    }
}

fn check_n(n: u64, ceiling: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(Module::ExactCount, "n must be at least 1"));
    }
    if n > ceiling {
        return Err(Error::Guard {
            module: Module::ExactCount,
            quantity: "n",
            value: n,
            limit: ceiling,
        });
    }
    Ok(())
}

/// Maximal partition length `M(z)` for every `z <= n_max`.
pub fn max_lengths(spectrum: &PartSpectrum, n_max: u64) -> Vec<usize> {
    (0..=n_max)
        .map(|z| {
            let mut remaining = z;
            let mut count = 0u64;
            for k in 1..=z {
                if remaining < k {
                    break;
                }
                let g = spectrum.g(k);
                let take = g.min(remaining / k);
                count += take;
                remaining -= take * k;
                if take < g {
                    break;
                }
            }
            count as usize
        })
        .collect()
}

/// Limb widths per row from `min_r (z r + f(r, 0))`.
fn row_widths(alpha: &AlphaParam, n_max: u64) -> Result<Vec<usize>> {
    let mut spectrum = build_spectrum(alpha, 256)?;
    let grid: Vec<f64> = (0..=160).map(|i| 0.01 * 1.05f64.powi(i)).collect();
    let mut values = Vec::with_capacity(grid.len());
    for &r in &grid {
        let pt = EvalPoint::new(r, 0.0);
        let v = loop {
            match f_value(&spectrum, &pt) {
                Ok(v) => break v,
                Err(Error::Truncation { needed, .. }) => spectrum.extend_to(needed)?,
                Err(e) => return Err(e),
            }
        };
        values.push(v);
    }
    Ok((0..=n_max)
        .map(|z| {
            let log_bound = grid
                .iter()
                .zip(&values)
                .map(|(r, f)| z as f64 * r + f)
                .fold(f64::INFINITY, f64::min);
            let bits = (log_bound * (1.0 + 1e-9) + 1.0) / std::f64::consts::LN_2 + 2.0;
            (bits / 64.0).ceil() as usize + 1
        })
        .collect())
}

fn limbs(x: &BigUint) -> Vec<u64> {
    x.to_u64_digits()
}

fn from_limbs(limbs: &[u64]) -> BigUint {
    let digits: Vec<u32> = limbs.iter().flat_map(|&l| [l as u32, (l >> 32) as u32]).collect();
    BigUint::new(digits)
}

/// `target += c * src`; false on a carry out of `target`.
#[inline]
fn mul_add(target: &mut [u64], src: &[u64], c: &[u64]) -> bool {
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0 {
            continue;
        }
        if i + src.len() > target.len() {
            return false;
        }
        let mut carry: u128 = 0;
        for (j, &sj) in src.iter().enumerate() {
            let t = target[i + j] as u128 + ci as u128 * sj as u128 + carry;
            target[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut idx = i + src.len();
        while carry != 0 {
            if idx >= target.len() {
                return false;
            }
            let t = target[idx] as u128 + carry;
            target[idx] = t as u64;
            carry = t >> 64;
            idx += 1;
        }
    }
    true
}

fn significant(x: &[u64]) -> &[u64] {
    let len = x.iter().rposition(|&l| l != 0).map_or(0, |i| i + 1);
    &x[..len]
}

/// Coefficient rows for all degrees up to `n_max`.
struct DpRows {
    data: Vec<u64>,
    offset: Vec<usize>,
    width: Vec<usize>,
    lengths: Vec<usize>,
}

impl DpRows {
    fn entry(&self, z: usize, m: usize) -> &[u64] {
        let start = self.offset[z] + m * self.width[z];
        &self.data[start..start + self.width[z]]
    }
}

fn run_dp(alpha: &AlphaParam, n_max: u64) -> Result<DpRows> {
    let spectrum = build_spectrum(alpha, n_max)?;
    let lengths = max_lengths(&spectrum, n_max);
    let width = row_widths(alpha, n_max)?;
    let mut offset = Vec::with_capacity(lengths.len());
    let mut total = 0usize;
    for z in 0..lengths.len() {
        offset.push(total);
        total += (lengths[z] + 1) * width[z];
    }
    let mut data = vec![0u64; total];
    data[0] = 1;
    let n = n_max as usize;
    for k in 1..=n {
        let g = spectrum.g(k as u64);
        let jmax = (g as usize).min(n / k);
        // C(g, j) for j = 1..=jmax.
        let mut binomials = Vec::with_capacity(jmax);
        let mut c = BigUint::one();
        for j in 1..=jmax as u64 {
            c = c * BigUint::from(g - j + 1) / BigUint::from(j);
            binomials.push(limbs(&c));
        }
        for z in (k..=n).rev() {
            let (lower, upper) = data.split_at_mut(offset[z]);
            let wz = width[z];
            let mz = lengths[z];
            for j in 1..=jmax.min(z / k) {
                let src_z = z - j * k;
                if j > mz {
                    break;
                }
                let ws = width[src_z];
                let top = lengths[src_z].min(mz - j);
                let coeff = &binomials[j - 1];
                for ms in 0..=top {
                    let s = offset[src_z] + ms * ws;
                    let src = significant(&lower[s..s + ws]);
                    if src.is_empty() {
                        continue;
                    }
                    let t = (ms + j) * wz;
                    if !mul_add(&mut upper[t..t + wz], src, coeff) {
                        return Err(Error::Guard {
                            module: Module::ExactCount,
                            quantity: "row width",
                            value: z as u64,
                            limit: wz as u64,
                        });
                    }
                }
            }
        }
    }
    Ok(DpRows {
        data,
        offset,
        width,
        lengths,
    })
}

/// Exact tables for each requested `n` from a single DP up to the largest.
pub fn count_tables(alpha: &AlphaParam, ns: &[u64], ceiling: u64) -> Result<Vec<ExactTable>> {
    rational_alpha(alpha)?;
    for &n in ns {
        check_n(n, ceiling)?;
    }
    let Some(&n_max) = ns.iter().max() else {
        return Ok(Vec::new());
    };
    let rows = run_dp(alpha, n_max)?;
    Ok(ns
        .iter()
        .map(|&n| {
            let z = n as usize;
            let counts = (0..=rows.lengths[z]).map(|m| from_limbs(rows.entry(z, m))).collect();
            ExactTable::from_counts(alpha.clone(), n, counts)
        })
        .collect())
}

/// `q(n, m)` for all `m`, with the default ceiling.
pub fn count_table(alpha: &AlphaParam, n: u64) -> Result<ExactTable> {
    count_table_with_ceiling(alpha, n, DEFAULT_CEILING)
}

pub fn count_table_with_ceiling(alpha: &AlphaParam, n: u64, ceiling: u64) -> Result<ExactTable> {
    Ok(count_tables(alpha, &[n], ceiling)?.remove(0))
}

/// Largest `v` with `v^q <= x`.
fn floor_root(x: u128, q: u32, from: u128) -> u128 {
    let mut v = from;
    while (v + 1).checked_pow(q).is_some_and(|t| t <= x) {
        v += 1;
    }
    v
}

/// Independent oracle: every `a` with `floor(a^alpha) <= n` is taken or left
/// out once, and partitions are tallied by value sum and size.
pub fn brute_force(alpha: &AlphaParam, n: u64) -> Result<ExactTable> {
    let (p, q) = rational_alpha(alpha)?;
    if n == 0 {
        return Err(Error::invalid(Module::ExactCount, "n must be at least 1"));
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Guard {
            module: Module::ExactCount,
            quantity: "brute-force n",
            value: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let n = n as usize;
    let mut table = vec![vec![0u128; n + 1]; n + 1];
    table[0][0] = 1;
    let mut value = 0u128;
    let mut a: u128 = 1;
    loop {
        let ap = a.checked_pow(p).ok_or(Error::Guard {
            module: Module::ExactCount,
            quantity: "a^p",
            value: a as u64,
            limit: u64::MAX,
        })?;
        value = floor_root(ap, q, value);
        if value > n as u128 {
            break;
        }
        let v = value as usize;
        if v > 0 {
            for z in (v..=n).rev() {
                for m in (1..=n).rev() {
                    let add = table[z - v][m - 1];
                    table[z][m] += add;
                }
            }
        }
        a += 1;
    }
    let row = &table[n];
    let last = row.iter().rposition(|&c| c != 0).unwrap_or(0);
    let counts = row[..=last].iter().map(|&c| BigUint::from(c)).collect();
    Ok(ExactTable::from_counts(alpha.clone(), n as u64, counts))
}

/// Exact law of the length with mean and variance.
pub fn distribution(table: &ExactTable) -> Result<DistributionView> {
    if table.total.is_zero() {
        return Err(Error::invalid(Module::ExactCount, "q(n) = 0 has no distribution"));
    }
    let total = BigInt::from(table.total.clone());
    let probabilities: Vec<BigRational> = table
        .counts
        .iter()
        .map(|c| BigRational::new(BigInt::from(c.clone()), total.clone()))
        .collect();
    let mut first = BigInt::zero();
    let mut second = BigInt::zero();
    for (m, c) in table.counts.iter().enumerate() {
        let c = BigInt::from(c.clone());
        let mb = BigInt::from(m);
        first += &c * &mb;
        second += &c * &mb * &mb;
    }
    let mean = BigRational::new(first, total.clone());
    let variance = BigRational::new(second, total) - &mean * &mean;
    Ok(DistributionView {
        n: table.n,
        probabilities,
        mean,
        variance,
    })
}
