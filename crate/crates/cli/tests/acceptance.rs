//! Acceptance suite: one line per criterion, nonzero exit on any unexpected
//! failure. Run with `cargo test -p powpart-cli --test acceptance`.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use powpart_core::asymptotics::{
    cdf_distance_from_moments, gaussian_from_moments, qn_from_saddle, qnm_from_saddle, ratio_from_saddles,
};
use powpart_core::boltzmann::{f_partial, f_partial_asymptotic, f_value, h_asymptotic, h_value, EvalPoint, PartialIndex};
use powpart_core::exact::{brute_force, count_tables, distribution, ln_biguint, ExactTable, DEFAULT_CEILING};
use powpart_core::saddle::{s_of_rho, solve_saddle, SaddlePoint, SolverConfig};
use powpart_core::special::{gamma_fn, gen_binomial, li_neg, polylog_neg_quadrature, polylog_neg_series};
use powpart_core::spectrum::{build_spectrum, check_order_bounds};
use powpart_core::{AlphaParam, PartSpectrum};

enum Outcome {
    Pass(String),
    Fail(String),
    /// Fails as stated; the cause is understood and verified here.
    KnownFail(String),
}

fn alpha(p: u32, q: u32) -> AlphaParam {
    AlphaParam::rational(p, q).unwrap()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

// ---------------------------------------------------------------- 1

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let ns: Vec<u64> = (1..=30).collect();
    let mut mismatches = Vec::new();
    for (p, q) in [(1, 2), (1, 3), (2, 3)] {
        let a = alpha(p, q);
        for t in count_tables(&a, &ns, DEFAULT_CEILING).unwrap() {
            if t != brute_force(&a, t.n).unwrap() {
                mismatches.push(format!("{p}/{q} n={}", t.n));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("90 tables compared in {secs:.2}s");
    if mismatches.is_empty() && secs < 60.0 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(format!("{detail}; mismatches {mismatches:?}"))
    }
}

// ---------------------------------------------------------------- 2

/// `floor(a^(p/q))` by integer search.
fn floor_pow(a: u128, p: u32, q: u32) -> u128 {
    let x = BigUint::from(a).pow(p);
    let mut lo = 0u128;
    let mut hi = 1u128;
    while BigUint::from(hi).pow(q) <= x {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if BigUint::from(mid).pow(q) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest `a` with `floor(a^(p/q)) >= k`.
fn first_preimage(k: u128, p: u32, q: u32) -> u128 {
    let mut lo = 0u128;
    let mut hi = 1u128;
    while floor_pow(hi, p, q) < k {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if floor_pow(mid, p, q) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn spectrum_correctness() -> Outcome {
    const K: u64 = 10_000;
    let mut problems = Vec::new();
    for (p, q) in [(1u32, 2u32), (1, 3), (2, 3)] {
        let s = build_spectrum(&alpha(p, q), K).unwrap();
        // Literal enumeration of a, as far as it stays cheap.
        let literal_k = match (p, q) {
            (1, 3) => 200u64,
            _ => K,
        };
        let mut counts = vec![0u64; literal_k as usize + 2];
        let mut a = 1u128;
        let mut v = 0u128;
        loop {
            while BigUint::from(v + 1).pow(q) <= BigUint::from(a).pow(p) {
                v += 1;
            }
            if v > literal_k as u128 {
                break;
            }
            counts[v as usize] += 1;
            a += 1;
        }
        if (1..=literal_k).any(|k| counts[k as usize] != s.g(k)) {
            problems.push(format!("{p}/{q}: literal enumeration differs"));
        }
        // Preimage boundaries for every k <= K.
        let firsts: Vec<u128> = (1..=K as u128 + 1).map(|k| first_preimage(k, p, q)).collect();
        if (1..=K).any(|k| (firsts[k as usize] - firsts[k as usize - 1]) as u64 != s.g(k)) {
            problems.push(format!("{p}/{q}: preimage boundaries differ"));
        }
        if !check_order_bounds(&s) {
            problems.push(format!("{p}/{q}: order bounds violated"));
        }
        // Telescoping: sum_{k<=K'} g(k) = #{a : floor(a^alpha) <= K'} = first(K'+1) - 1.
        let mut prefix = 0u128;
        for k in 1..=K {
            prefix += s.g(k) as u128;
            if prefix != firsts[k as usize] - 1 {
                problems.push(format!("{p}/{q}: prefix identity fails at {k}"));
                break;
            }
        }
    }
    if problems.is_empty() {
        Outcome::Pass("k <= 1e4 for 1/2, 1/3, 2/3".into())
    } else {
        Outcome::Fail(problems.join("; "))
    }
}

// ---------------------------------------------------------------- 3

fn saddle_residuals() -> Outcome {
    let a = alpha(1, 2);
    let mut s = build_spectrum(&a, 64).unwrap();
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for n in [100u64, 1_000, 10_000, 1_000_000] {
        let centre = solve_saddle(n, None, &mut s, &cfg).unwrap();
        let sigma = centre.b2.sqrt();
        let mut points = vec![centre];
        for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let m = (centre.s + k * sigma).round() as u64;
            points.push(solve_saddle(n, Some(m), &mut s, &cfg).unwrap());
        }
        for sp in points {
            // Residuals recomputed from independent evaluations.
            let pt = EvalPoint::new(sp.r, sp.rho);
            let f10 = f_partial(&s, &pt, PartialIndex::new(1, 0).unwrap()).unwrap();
            let f01 = f_partial(&s, &pt, PartialIndex::new(0, 1).unwrap()).unwrap();
            worst = worst.max((n as f64 + f10).abs() / n as f64);
            if let Some(m) = sp.m {
                worst = worst.max((m as f64 - f01).abs() / m as f64);
            }
            if !(sp.delta > 0.0 && sp.b2 > 0.0) {
                return Outcome::Fail(format!("non-positive delta or b2 at n={n}"));
            }
            solves += 1;
        }
    }
    let detail = format!("{solves} solves, worst relative residual {worst:.2e}");
    if worst <= 1e-10 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- 4

/// Central-difference weights for derivative order 0..=3 (offsets -2..=2).
const STENCIL: [[f64; 5]; 4] = [
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [0.0, -0.5, 0.0, 0.5, 0.0],
    [0.0, 1.0, -2.0, 1.0, 0.0],
    [-0.5, 1.0, 0.0, -1.0, 0.5],
];

fn difference(s: &PartSpectrum, r: f64, rho: f64, p: usize, q: usize, hr: f64, hs: f64) -> f64 {
    let mut total = 0.0;
    for (i, wi) in STENCIL[p].iter().enumerate() {
        if *wi == 0.0 {
            continue;
        }
        for (j, wj) in STENCIL[q].iter().enumerate() {
            if *wj == 0.0 {
                continue;
            }
            let pt = EvalPoint::new(r + (i as f64 - 2.0) * hr, rho + (j as f64 - 2.0) * hs).with_epsilon(1e-15);
            total += wi * wj * f_value(s, &pt).unwrap();
        }
    }
    total / (hr.powi(p as i32) * hs.powi(q as i32))
}

/// Two Richardson steps on the `O(h^2)` tensor stencil.
fn fd_partial(s: &PartSpectrum, r: f64, rho: f64, p: usize, q: usize) -> f64 {
    let (hr, hs) = (0.05 * r, 0.05);
    let d: Vec<f64> = [1.0, 0.5, 0.25]
        .iter()
        .map(|c| difference(s, r, rho, p, q, c * hr, c * hs))
        .collect();
    let e1 = (4.0 * d[1] - d[0]) / 3.0;
    let e2 = (4.0 * d[2] - d[1]) / 3.0;
    (16.0 * e2 - e1) / 15.0
}

fn derivative_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (p, q) in [(1, 2), (1, 3), (2, 3)] {
        let s = build_spectrum(&alpha(p, q), 100_000).unwrap();
        for (r, rho) in [(0.3, 0.2), (0.05, 1.0)] {
            for (dp, dq) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)] {
                let exact = f_partial(&s, &EvalPoint::new(r, rho), PartialIndex::new(dp, dq).unwrap()).unwrap();
                let fd = fd_partial(&s, r, rho, dp as usize, dq as usize);
                let rel = (fd - exact).abs() / exact.abs();
                if rel > worst {
                    worst = rel;
                    at = format!("{p}/{q} ({dp},{dq}) at ({r},{rho})");
                }
            }
        }
    }
    let detail = format!("54 partials, worst relative deviation {worst:.2e} ({at})");
    if worst <= 1e-6 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- 5

const RS: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

/// Scaled errors must not grow beyond a factor 2 over the r sweep; the
/// floor absorbs rounding when the true error is near zero.
fn bounded(errors: &[f64], floors: &[f64]) -> bool {
    let reference = errors[0].max(floors[0]);
    errors.iter().zip(floors).all(|(e, fl)| *e <= 2.0 * reference + fl)
}

fn harmonic_asymptotics() -> Outcome {
    let orders = [(0u32, 0u32), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
    let mut h_ok = true;
    let mut f_ok_two_thirds = true;
    let mut failing = Vec::new();
    let mut mechanism_ok = true;
    for (p, q) in [(1u32, 2u32), (1, 3), (2, 3)] {
        let a = alpha(p, q);
        let beta = a.beta();
        let s = build_spectrum(&a, 200_000).unwrap();
        for (dp, dq) in orders {
            let mut h_err = Vec::new();
            let mut h_floor = Vec::new();
            let mut f_err = Vec::new();
            let mut f_floor = Vec::new();
            let mut f_err_with_const = Vec::new();
            for r in RS {
                let hv = h_value(beta - 1.0, dp, dq, r, 0.0, 1e-14).unwrap();
                let he = h_asymptotic(beta - 1.0, dp, dq, r, 0.0).unwrap();
                h_err.push((hv - he.value).abs() * r.sqrt());
                h_floor.push(1e-11 * hv.abs() * r.sqrt());

                let scale = r.powf(dp as f64 + 0.5);
                let fv = f_partial(&s, &EvalPoint::new(r, 0.0).with_epsilon(1e-14), PartialIndex::new(dp, dq).unwrap()).unwrap();
                let fe = f_partial_asymptotic(&a, dp, dq, r, 0.0).unwrap();
                f_err.push((fv - fe.value).abs() * scale);
                f_floor.push(1e-11 * fv.abs() * scale);
                // For integer beta, the constant 1 = C(beta, beta) k^0 in the
                // expansion of g(k) adds (-1)^(p+1) Li_{2-q} Gamma(p+1) r^-(p+1).
                let extra = if beta.fract() == 0.0 {
                    let sign = if dp % 2 == 1 { 1.0 } else { -1.0 };
                    // Li_0(-e^rho) = -e^rho / (1 + e^rho), which is -1/2 at rho = 0.
                    let li = if dq == 2 { -0.5 } else { li_neg(2.0 - dq as f64, 0.0).unwrap() };
                    sign * gen_binomial(beta, beta as u32)
                        * li
                        * gamma_fn(dp as f64 + 1.0).unwrap()
                        * r.powf(-(dp as f64 + 1.0))
                } else {
                    0.0
                };
                f_err_with_const.push((fv - fe.value - extra).abs() * scale);
            }
            h_ok &= bounded(&h_err, &h_floor);
            if !bounded(&f_err, &f_floor) {
                failing.push(format!("{p}/{q} f{dp}{dq} {}", fmt(&f_err)));
                // Documented cause: growth r^(-1/2) per step, removed by the constant term.
                let ratios: Vec<f64> = f_err.windows(2).map(|w| w[1] / w[0]).collect();
                let sqrt2 = std::f64::consts::SQRT_2;
                mechanism_ok &= beta.fract() == 0.0
                    && ratios.iter().all(|x| (x - sqrt2).abs() < 0.1 * sqrt2)
                    && bounded(&f_err_with_const, &f_floor);
                if p == 2 {
                    f_ok_two_thirds = false;
                }
            }
        }
    }
    if !h_ok || !f_ok_two_thirds {
        return Outcome::Fail(format!("h bounded: {h_ok}; alpha=2/3 f bounded: {f_ok_two_thirds}; {}", failing.join("; ")));
    }
    if failing.is_empty() {
        return Outcome::Pass("h and f scaled errors bounded for 1/2, 1/3, 2/3".into());
    }
    if mechanism_ok {
        Outcome::KnownFail(format!(
            "f-part grows by sqrt(2) per halving for integer beta (constant term of g(k) is O(r^-(p+1))); \
             bounded once that term is added; h-part and alpha=2/3 bounded. {} series affected",
            failing.len()
        ))
    } else {
        Outcome::Fail(failing.join("; "))
    }
}

// ---------------------------------------------------------------- 6..10

struct Grid {
    alpha: AlphaParam,
    tables: Vec<ExactTable>,
    centres: Vec<SaddlePoint>,
    spectrum: PartSpectrum,
}

fn grid(p: u32, q: u32, ns: &[u64]) -> Grid {
    let a = alpha(p, q);
    let tables = count_tables(&a, ns, DEFAULT_CEILING).unwrap();
    let mut spectrum = build_spectrum(&a, 64).unwrap();
    let centres = ns
        .iter()
        .map(|&n| solve_saddle(n, None, &mut spectrum, &SolverConfig::default()).unwrap())
        .collect();
    Grid {
        alpha: a,
        tables,
        centres,
        spectrum,
    }
}

fn qn_convergence(g: &Grid) -> Outcome {
    let errs: Vec<f64> = g
        .tables
        .iter()
        .zip(&g.centres)
        .map(|(t, c)| (qn_from_saddle(c, g.alpha.beta()).log_value - ln_biguint(&t.total)).abs())
        .collect();
    let detail = format!("log errors {} on n=250..2000", fmt(&errs));
    if strictly_decreasing(&errs) && errs[3] < 0.1 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn qnm_convergence(g: &mut Grid) -> Outcome {
    let mut errs = Vec::new();
    for (t, c) in g.tables.iter().zip(&g.centres) {
        let m = c.s.round() as u64;
        let sp = solve_saddle(t.n, Some(m), &mut g.spectrum, &SolverConfig::default()).unwrap();
        let est = qnm_from_saddle(&sp, g.alpha.beta()).unwrap();
        errs.push((est.log_value - ln_biguint(&t.count(m))).abs());
    }
    let detail = format!("log errors {} at m=round(mu_n)", fmt(&errs));
    if strictly_decreasing(&errs) && errs[3] < 0.15 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn local_limit(g: &mut Grid) -> Outcome {
    let cfg = SolverConfig::default();
    let mut deviations = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut ratio_ok = true;
    for (t, c) in g.tables.iter().zip(&g.centres).skip(1) {
        let sigma = c.b2.sqrt();
        let mut dev: f64 = 0.0;
        for i in 0..=8 {
            let x = -2.0 + 0.5 * i as f64;
            let m = (c.s + x * sigma).round() as u64;
            let gauss = gaussian_from_moments(t.n, m, c.s, c.b2, g.alpha.alpha()).unwrap();
            let p = t.probability(m);
            let scaled = p * (2.0 * std::f64::consts::PI).sqrt() * sigma * (gauss.x * gauss.x / 2.0).exp();
            dev = dev.max((scaled - 1.0).abs());
            let sp = solve_saddle(t.n, Some(m), &mut g.spectrum, &cfg).unwrap();
            let ratio = ratio_from_saddles(c, &sp, g.alpha.beta()).unwrap();
            let rel = (ratio.probability / gauss.probability - 1.0).abs();
            let allowed = 3.0 * gauss.error_scale;
            ratio_ok &= rel <= allowed;
            if allowed > 0.0 {
                worst_ratio = worst_ratio.max(rel / allowed);
            }
        }
        deviations.push(dev);
    }
    let detail = format!(
        "max deviations {} on n=500..2000; ratio/gauss uses at most {:.1}% of 3x error scale",
        fmt(&deviations),
        100.0 * worst_ratio
    );
    if strictly_decreasing(&deviations) && ratio_ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn clt(half: &Grid, two_thirds: &Grid) -> Outcome {
    let dist = |g: &Grid| -> Vec<f64> {
        g.tables
            .iter()
            .zip(&g.centres)
            .map(|(t, c)| cdf_distance_from_moments(t, c.s, c.b2))
            .collect()
    };
    let a = dist(half);
    let b = dist(two_thirds);
    let detail = format!("1/2 {}; 2/3 {}", fmt(&a), fmt(&b));
    if strictly_decreasing(&a) && strictly_decreasing(&b) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn moments(g: &mut Grid) -> Outcome {
    let mut mean_err = Vec::new();
    let mut var_err = Vec::new();
    let mut identity_worst: f64 = 0.0;
    let tight = SolverConfig::default().with_tolerance(1e-14);
    for (t, c) in g.tables.iter().zip(&g.centres) {
        let d = distribution(t).unwrap();
        mean_err.push((c.s / d.mean_f64() - 1.0).abs());
        var_err.push((c.b2 / d.variance_f64() - 1.0).abs());

        // Closed forms at eta = r(0), summed directly.
        let eta = c.r;
        let (mut mu, mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0, 0.0);
        let kmax = (60.0 / eta) as u64 + 10;
        g.spectrum.extend_to(kmax.max(g.spectrum.kmax())).unwrap();
        for k in 1..=kmax {
            let gk = g.spectrum.g(k) as f64;
            let kf = k as f64;
            let e = (-eta * kf).exp();
            mu += gk * e / (1.0 + e);
            let w = gk * e / ((1.0 + e) * (1.0 + e));
            s0 += w;
            s1 += w * kf;
            s2 += w * kf * kf;
        }
        let sigma2 = s0 - s1 * s1 / s2;

        // S(0) and S'(0) by Richardson-extrapolated differences.
        let s_at = |rho: f64, sp: &mut PartSpectrum| s_of_rho(t.n, rho, sp, &tight).unwrap();
        let s0_route = s_at(0.0, &mut g.spectrum);
        let diff = |h: f64, sp: &mut PartSpectrum| (s_at(h, sp) - s_at(-h, sp)) / (2.0 * h);
        let d1 = diff(0.02, &mut g.spectrum);
        let d2 = diff(0.01, &mut g.spectrum);
        let s_prime = (4.0 * d2 - d1) / 3.0;

        identity_worst = identity_worst
            .max((c.b2 / sigma2 - 1.0).abs())
            .max((mu / s0_route - 1.0).abs())
            .max((sigma2 / s_prime - 1.0).abs())
            .max((c.s / mu - 1.0).abs());
    }
    let detail = format!(
        "mean rel err {}, variance rel err {}, identities within {identity_worst:.1e}",
        fmt(&mean_err),
        fmt(&var_err)
    );
    if strictly_decreasing(&mean_err) && strictly_decreasing(&var_err) && identity_worst <= 1e-8 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- 11

fn special_functions() -> Outcome {
    let mut problems = Vec::new();
    for i in -40..=40 {
        let rho = i as f64 * 0.5;
        let v = li_neg(1.0, rho).unwrap();
        let exact = -rho.exp().ln_1p();
        if (v - exact).abs() > 1e-12 * exact.abs() {
            problems.push(format!("Li1 at {rho}"));
        }
    }
    for s in [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0] {
        let a = polylog_neg_series(s, 0.0, 1e-15);
        let b = polylog_neg_quadrature(s, 0.0, 1e-13).unwrap();
        if (a - b).abs() > 1e-10 * a.abs() {
            problems.push(format!("Li_{s}(-1) series {a} vs quadrature {b}"));
        }
    }
    let mut spread = Vec::new();
    for s in [0.5f64, 1.5, 2.0, 2.5, 3.0, 4.0] {
        let sommerfeld = (s * (s - 1.0)).abs() * std::f64::consts::PI.powi(2) / 6.0;
        let devs: Vec<f64> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&rho: &f64| {
                let li = li_neg(s, rho).unwrap();
                (li * gamma_fn(s + 1.0).unwrap() / rho.powf(s) + 1.0).abs() * rho * rho
            })
            .collect();
        // Empirical constant: the first Sommerfeld coefficient plus one.
        if devs.iter().any(|d| *d > sommerfeld + 1.0) {
            problems.push(format!("large-rho deviation for s={s}: {}", fmt(&devs)));
        }
        spread.push(devs[3]);
    }
    if problems.is_empty() {
        Outcome::Pass(format!("rho^2-scaled deviations at rho=80: {}", fmt(&spread)))
    } else {
        Outcome::Fail(problems.join("; "))
    }
}

// ---------------------------------------------------------------- 12

fn powpart(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_powpart"))
        .args(args)
        .env_remove("POWPART_PRECISION_DIGITS")
        .env_remove("POWPART_EPSILON")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism_and_guards() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let report = dir.path().join("report.csv");
    std::fs::write(
        &config,
        format!(
            r#"{{"alpha":"1/2","n_grid":[3,50,200],"m_policy":{{"x-grid":{{"lo":-1,"hi":1,"step":0.5}}}},
                "output":{{"path":{:?},"format":"csv"}}}}"#,
            report.display().to_string()
        ),
    )
    .unwrap();
    let cfg = config.to_str().unwrap();
    let mut problems = Vec::new();
    let (c1, _) = powpart(&["report", "--config", cfg]);
    let first = std::fs::read(&report).unwrap_or_default();
    let (c2, _) = powpart(&["report", "--config", cfg]);
    let second = std::fs::read(&report).unwrap_or_default();
    if c1 != 0 || c2 != 0 || first.is_empty() || first != second {
        problems.push("report not byte-identical".to_string());
    }
    let (e1, out1) = powpart(&["exact", "--alpha", "1/2", "--n", "30", "--format", "json"]);
    let (e2, out2) = powpart(&["exact", "--alpha", "1/2", "--n", "30", "--format", "json"]);
    if e1 != 0 || e2 != 0 || out1 != out2 {
        problems.push("exact output not byte-identical".to_string());
    }

    let decimal = dir.path().join("decimal.json");
    std::fs::write(&decimal, r#"{"alpha":"0.7","n_grid":[20],"m_policy":"center"}"#).unwrap();
    let cases: [(&[&str], i32, &str); 5] = [
        (&["report", "--config", decimal.to_str().unwrap()], 2, "decimal alpha with exact comparison"),
        (&["saddle", "--alpha", "0.5", "--n", "100"], 4, "uncertifiable decimal alpha"),
        (&["saddle", "--alpha", "1/2", "--n", "10", "--m", "7"], 2, "m above maximal length"),
        (&["asym", "--alpha", "1/2", "--n", "10", "--m", "0"], 2, "m = 0"),
        (&["exact", "--alpha", "1/2", "--n", "5000"], 5, "n above exact ceiling"),
    ];
    for (args, expected, what) in cases {
        let (code, _) = powpart(args);
        if code != expected {
            problems.push(format!("{what}: exit {code}, expected {expected}"));
        }
    }
    if problems.is_empty() {
        Outcome::Pass("repeat runs identical; exit codes 2, 4, 2, 2, 5 as documented".into())
    } else {
        Outcome::Fail(problems.join("; "))
    }
}

fn main() {
    // Accept and ignore libtest-style arguments passed by `cargo test`.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |name: &str| filter.is_empty() || filter.iter().any(|f| name.contains(f.as_str()));

    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut record = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(name) {
            return;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => ("FAIL", d),
            Outcome::KnownFail(d) => ("FAIL (known, see notes)", d),
        };
        println!("criterion {id:>2} {name}: {tag} [{secs:.1}s] {detail}");
        results.push((id, name, outcome, secs));
    };

    record(1, "oracle-equivalence", &mut oracle_equivalence);
    record(2, "spectrum-correctness", &mut spectrum_correctness);
    record(3, "saddle-residuals", &mut saddle_residuals);
    record(4, "derivative-consistency", &mut derivative_consistency);
    record(5, "harmonic-asymptotics", &mut harmonic_asymptotics);

    let grid_names = ["qn-convergence", "qnm-convergence", "local-limit", "clt", "moments"];
    if grid_names.iter().any(|n| wanted(n)) {
        let mut half = grid(1, 2, &[250, 500, 1000, 2000]);
        record(6, "qn-convergence", &mut || qn_convergence(&half));
        record(7, "qnm-convergence", &mut || qnm_convergence(&mut half));
        record(8, "local-limit", &mut || local_limit(&mut half));
        if wanted("clt") {
            let two_thirds = grid(2, 3, &[250, 500, 1000, 2000]);
            record(9, "clt", &mut || clt(&half, &two_thirds));
        }
        record(10, "moments", &mut || moments(&mut half));
    }
    record(11, "special-functions", &mut special_functions);
    record(12, "determinism-and-guards", &mut determinism_and_guards);

    let failed: Vec<usize> = results
        .iter()
        .filter(|(_, _, o, _)| matches!(o, Outcome::Fail(_)))
        .map(|(id, ..)| *id)
        .collect();
    let known = results.iter().filter(|(_, _, o, _)| matches!(o, Outcome::KnownFail(_))).count();
    let passed = results.iter().filter(|(_, _, o, _)| matches!(o, Outcome::Pass(_))).count();
    println!("acceptance: {passed} passed, {known} known failure(s), {} unexpected failure(s)", failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
