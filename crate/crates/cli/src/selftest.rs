//! Built-in invariant checks runnable from the binary.

use std::fmt::Write as _;

use clap::ValueEnum;
use powpart_core::asymptotics::{cdf_distance_from_moments, qn_from_saddle, qnm_from_saddle, ratio_from_saddles};
use powpart_core::boltzmann::{f_partial, f_value, low_order, EvalPoint, PartialIndex};
use powpart_core::exact::{brute_force, count_tables, ln_biguint, DEFAULT_CEILING};
use powpart_core::saddle::{s_of_rho, solve_saddle, SolverConfig};
use powpart_core::special::{gamma_fn, li_neg, polylog_neg_quadrature, polylog_neg_series};
use powpart_core::spectrum::{build_spectrum, check_order_bounds, g_of_k};
use powpart_core::AlphaParam;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "special-fn")]
    SpecialFn,
    Boltzmann,
    Saddle,
    Exact,
    Asym,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::SpecialFn => "special-fn",
            Suite::Boltzmann => "boltzmann",
            Suite::Saddle => "saddle",
            Suite::Exact => "exact",
            Suite::Asym => "asym",
            Suite::All => "all",
        }
    }
}

type Check = (&'static str, fn() -> Result<bool, powpart_core::Error>);

fn alphas() -> [AlphaParam; 3] {
    [
        AlphaParam::rational(1, 2).expect("valid"),
        AlphaParam::rational(1, 3).expect("valid"),
        AlphaParam::rational(2, 3).expect("valid"),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

const SPECIAL: [Check; 4] = [
    ("li1-closed-form", || {
        for i in -20..=20 {
            let rho = i as f64 * 0.5;
            if !close(li_neg(1.0, rho)?, -rho.exp().ln_1p(), 1e-12) {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("li2-at-minus-one", || {
        Ok(close(li_neg(2.0, 0.0)?, -std::f64::consts::PI.powi(2) / 12.0, 1e-13))
    }),
    ("series-vs-quadrature", || {
        for s in [0.5, 1.5, 2.0, 3.5] {
            for rho in [-1.0, -0.5, 0.0] {
                let a = polylog_neg_series(s, rho, 1e-14);
                let b = polylog_neg_quadrature(s, rho, 1e-13)?;
                if (a - b).abs() > 1e-10 * a.abs() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }),
    ("gamma-factorials", || {
        let mut fact = 1.0;
        for k in 1..15 {
            fact *= k as f64;
            if !close(gamma_fn(k as f64 + 1.0)?, fact, 1e-13) {
                return Ok(false);
            }
        }
        Ok(true)
    }),
];

const BOLTZMANN: [Check; 3] = [
    ("spectrum-examples", || {
        let [half, third, two_thirds] = alphas();
        Ok(g_of_k(&half, 1)? == 3 && g_of_k(&half, 3)? == 7 && g_of_k(&third, 1)? == 7 && g_of_k(&two_thirds, 1)? == 2)
    }),
    ("order-bounds", || {
        for a in alphas() {
            if !check_order_bounds(&build_spectrum(&a, 2000)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("finite-differences", || {
        for a in alphas() {
            let s = build_spectrum(&a, 20_000)?;
            let (r, rho, h) = (0.3, 0.2, 1e-5);
            let d_r = (f_value(&s, &EvalPoint::new(r + h, rho))? - f_value(&s, &EvalPoint::new(r - h, rho))?) / (2.0 * h);
            let d_rho = (f_value(&s, &EvalPoint::new(r, rho + h))? - f_value(&s, &EvalPoint::new(r, rho - h))?) / (2.0 * h);
            let pt = EvalPoint::new(r, rho);
            let f10 = f_partial(&s, &pt, PartialIndex::new(1, 0)?)?;
            let f01 = f_partial(&s, &pt, PartialIndex::new(0, 1)?)?;
            if !close(d_r, f10, 1e-6) || !close(d_rho, f01, 1e-6) || low_order(&s, &pt)?.delta() <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }),
];

const SADDLE: [Check; 2] = [
    ("residuals", || {
        let [half, ..] = alphas();
        let mut s = build_spectrum(&half, 64)?;
        let cfg = SolverConfig::default();
        let centre = solve_saddle(1000, None, &mut s, &cfg)?;
        let sigma = centre.b2.sqrt();
        for m in [centre.s - sigma, centre.s, centre.s + sigma] {
            let sp = solve_saddle(1000, Some(m.round() as u64), &mut s, &cfg)?;
            if sp.residual_n > 1e-10 || sp.residual_m.unwrap_or(1.0) > 1e-10 || sp.delta <= 0.0 || sp.b2 <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("s-prime-identity", || {
        let [_, _, two_thirds] = alphas();
        let mut s = build_spectrum(&two_thirds, 64)?;
        let cfg = SolverConfig::default().with_tolerance(1e-14);
        let sp = solve_saddle(500, None, &mut s, &cfg)?;
        let h = 1e-4;
        let fd = (s_of_rho(500, h, &mut s, &cfg)? - s_of_rho(500, -h, &mut s, &cfg)?) / (2.0 * h);
        Ok(close(fd, sp.s_prime(), 1e-5))
    }),
];

const EXACT: [Check; 1] = [("dp-equals-brute-force", || {
    let ns: Vec<u64> = (1..=30).collect();
    for a in alphas() {
        for t in count_tables(&a, &ns, DEFAULT_CEILING)? {
            if t != brute_force(&a, t.n)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
})];

const ASYM: [Check; 2] = [
    ("qn-and-ratio-identity", || {
        let [half, ..] = alphas();
        let mut s = build_spectrum(&half, 64)?;
        let cfg = SolverConfig::default();
        let table = count_tables(&half, &[400], DEFAULT_CEILING)?.remove(0);
        let centre = solve_saddle(400, None, &mut s, &cfg)?;
        let qn = qn_from_saddle(&centre, half.beta());
        let m = centre.s.round() as u64 + 2;
        let sp = solve_saddle(400, Some(m), &mut s, &cfg)?;
        let ratio = ratio_from_saddles(&centre, &sp, half.beta())?;
        let qnm = qnm_from_saddle(&sp, half.beta())?;
        Ok((qn.log_value - ln_biguint(&table.total)).abs() < 0.1
            && close(ratio.probability, (qnm.log_value - qn.log_value).exp(), 1e-12))
    }),
    ("cdf-distance-range", || {
        let [half, ..] = alphas();
        let mut s = build_spectrum(&half, 64)?;
        let cfg = SolverConfig::default();
        let table = count_tables(&half, &[300], DEFAULT_CEILING)?.remove(0);
        let centre = solve_saddle(300, None, &mut s, &cfg)?;
        let d = cdf_distance_from_moments(&table, centre.s, centre.b2);
        Ok((0.0..=1.0).contains(&d) && d < 0.2)
    }),
];

fn checks(suite: Suite) -> Vec<(&'static str, &'static [Check])> {
    match suite {
        Suite::SpecialFn => vec![("special-fn", &SPECIAL[..])],
        Suite::Boltzmann => vec![("boltzmann", &BOLTZMANN[..])],
        Suite::Saddle => vec![("saddle", &SADDLE[..])],
        Suite::Exact => vec![("exact", &EXACT[..])],
        Suite::Asym => vec![("asym", &ASYM[..])],
        Suite::All => [Suite::SpecialFn, Suite::Boltzmann, Suite::Saddle, Suite::Exact, Suite::Asym]
            .into_iter()
            .flat_map(checks)
            .collect(),
    }
}

/// Runs a suite; returns the printed summary and whether every check passed.
pub fn run_suite(suite: Suite) -> (String, bool) {
    let mut out = String::new();
    let mut all = true;
    for (group, list) in checks(suite) {
        for (name, check) in list {
            let (status, detail) = match check() {
                Ok(true) => ("PASS", String::new()),
                Ok(false) => ("FAIL", String::new()),
                Err(e) => ("FAIL", format!(" ({e})")),
            };
            all &= status == "PASS";
            let _ = writeln!(out, "{group} {name}: {status}{detail}");
        }
    }
    (out, all)
}
