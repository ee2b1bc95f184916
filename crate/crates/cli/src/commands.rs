//! Subcommand bodies. Each returns the text it would print so that callers
//! decide between stdout and a file.

use std::fmt::Write as _;

use powpart_core::asymptotics::{gaussian_from_moments, qn_from_saddle, qnm_from_saddle, ratio_from_saddles};
use powpart_core::exact::{count_tables, ln_biguint, DEFAULT_CEILING};
use powpart_core::saddle::{m_range, solve_saddle, SaddlePoint};
use powpart_core::spectrum::build_spectrum;
use powpart_core::{AlphaParam, ExactTable, PartSpectrum};
use serde_json::{json, Map, Value};

use crate::config::{Format, MPolicy, RunConfig, Settings};
use crate::error::{HarnessError, HarnessResult};
use crate::format::{json_num, num};

pub fn parse_alpha(text: &str) -> HarnessResult<AlphaParam> {
    Ok(text.parse::<AlphaParam>()?)
}

fn spectrum_for(alpha: &AlphaParam) -> HarnessResult<PartSpectrum> {
    Ok(build_spectrum(alpha, 64)?)
}

/// `k,g` rows for `k = 1..=kmax`.
pub fn spectrum_csv(alpha: &AlphaParam, kmax: u64) -> HarnessResult<String> {
    let spectrum = build_spectrum(alpha, kmax)?;
    let mut out = String::from("k,g\n");
    for (i, g) in spectrum.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, g);
    }
    Ok(out)
}

fn exact_json(table: &ExactTable) -> Value {
    let counts: Map<String, Value> = table
        .counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| (m.to_string(), Value::String(c.to_string())))
        .collect();
    json!({
        "alpha": table.alpha.to_string(),
        "n": table.n,
        "counts": Value::Object(counts),
        "total": table.total.to_string(),
    })
}

/// `q(n, m)` for all `m` with a `total` footer, or the JSON mirror.
pub fn exact_output(alpha: &AlphaParam, n: u64, format: Format, ceiling: u64) -> HarnessResult<String> {
    let table = count_tables(alpha, &[n], ceiling)?.remove(0);
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("m,q_n_m\n");
            for (m, c) in table.counts.iter().enumerate().skip(1) {
                let _ = writeln!(out, "{m},{c}");
            }
            let _ = writeln!(out, "total,{}", table.total);
            out
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&exact_json(&table)).expect("serializable")),
    })
}

fn saddle_json(sp: &SaddlePoint, mu: f64, sigma2: f64) -> Value {
    json!({
        "n": sp.n,
        "m": sp.m,
        "r": json_num(sp.r),
        "rho": json_num(sp.rho),
        "residual_n": json_num(sp.residual_n),
        "residual_m": sp.residual_m.map(json_num),
        "B2": json_num(sp.big_b2),
        "b2": json_num(sp.b2),
        "delta": json_num(sp.delta),
        "mu_n": json_num(mu),
        "sigma2_n": json_num(sigma2),
    })
}

pub fn saddle_output(alpha: &AlphaParam, n: u64, m: Option<u64>, json_out: bool, settings: &Settings) -> HarnessResult<String> {
    let cfg = settings.solver();
    let mut spectrum = spectrum_for(alpha)?;
    let centre = solve_saddle(n, None, &mut spectrum, &cfg)?;
    let sp = match m {
        Some(_) => solve_saddle(n, m, &mut spectrum, &cfg)?,
        None => centre,
    };
    if json_out {
        return Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&saddle_json(&sp, centre.s, centre.b2)).expect("serializable")
        ));
    }
    let mut out = String::new();
    let _ = writeln!(out, "alpha {alpha}");
    let _ = writeln!(out, "n {n}");
    if let Some(m) = m {
        let _ = writeln!(out, "m {m}");
    }
    let _ = writeln!(out, "r {}", num(sp.r));
    let _ = writeln!(out, "rho {}", num(sp.rho));
    let _ = writeln!(out, "residual_n {}", num(sp.residual_n));
    if let Some(res) = sp.residual_m {
        let _ = writeln!(out, "residual_m {}", num(res));
    }
    let _ = writeln!(out, "B2 {}", num(sp.big_b2));
    let _ = writeln!(out, "b2 {}", num(sp.b2));
    let _ = writeln!(out, "delta {}", num(sp.delta));
    let _ = writeln!(out, "mu_n {}", num(centre.s));
    let _ = writeln!(out, "sigma2_n {}", num(centre.b2));
    Ok(out)
}

pub fn asym_output(alpha: &AlphaParam, n: u64, m: Option<u64>, settings: &Settings) -> HarnessResult<String> {
    let cfg = settings.solver();
    let mut spectrum = spectrum_for(alpha)?;
    let beta = alpha.beta();
    let centre = solve_saddle(n, None, &mut spectrum, &cfg)?;
    let qn = qn_from_saddle(&centre, beta);
    let mut out = String::new();
    let _ = writeln!(out, "alpha {alpha}");
    let _ = writeln!(out, "n {n}");
    let _ = writeln!(out, "log_q_n {}", num(qn.log_value));
    let _ = writeln!(out, "q_n {}", num(qn.value));
    let _ = writeln!(out, "error_scale {}", num(qn.error_scale));
    if let Some(m) = m {
        let sp = solve_saddle(n, Some(m), &mut spectrum, &cfg)?;
        let qnm = qnm_from_saddle(&sp, beta)?;
        let gauss = gaussian_from_moments(n, m, centre.s, centre.b2, alpha.alpha())?;
        let ratio = ratio_from_saddles(&centre, &sp, beta)?;
        let _ = writeln!(out, "m {m}");
        let _ = writeln!(out, "x {}", num(gauss.x));
        let _ = writeln!(out, "log_q_n_m {}", num(qnm.log_value));
        let _ = writeln!(out, "q_n_m {}", num(qnm.value));
        let _ = writeln!(out, "p_gauss {}", num(gauss.probability));
        let _ = writeln!(out, "p_ratio {}", num(ratio.probability));
        let _ = writeln!(out, "llt_error_scale {}", num(gauss.error_scale));
    }
    Ok(out)
}

/// One comparison row for a single `(n, m)`.
struct Row {
    n: u64,
    m: u64,
    x: f64,
    p_exact: Option<f64>,
    p_gauss: f64,
    p_ratio: f64,
    mu: f64,
    sigma: f64,
    r: f64,
    rho: f64,
    log_qn_asym: f64,
    log_qnm_asym: f64,
    error_scale: f64,
}

fn row_for(
    n: u64,
    m: u64,
    centre: &SaddlePoint,
    spectrum: &mut PartSpectrum,
    settings: &Settings,
    table: Option<&ExactTable>,
) -> HarnessResult<Row> {
    let alpha = spectrum.alpha().clone();
    let beta = alpha.beta();
    let sp = solve_saddle(n, Some(m), spectrum, &settings.solver())?;
    let gauss = gaussian_from_moments(n, m, centre.s, centre.b2, alpha.alpha())?;
    let ratio = ratio_from_saddles(centre, &sp, beta)?;
    let qnm = qnm_from_saddle(&sp, beta)?;
    Ok(Row {
        n,
        m,
        x: gauss.x,
        p_exact: table.map(|t| t.probability(m)),
        p_gauss: gauss.probability,
        p_ratio: ratio.probability,
        mu: centre.s,
        sigma: centre.b2.sqrt(),
        r: sp.r,
        rho: sp.rho,
        log_qn_asym: qn_from_saddle(centre, beta).log_value,
        log_qnm_asym: qnm.log_value,
        error_scale: qnm.error_scale,
    })
}

/// Lengths for an x grid: `round(mu + x sigma)` kept when admissible.
fn grid_lengths(centre: &SaddlePoint, xs: &[f64], upper: u64) -> Vec<u64> {
    let sigma = centre.b2.sqrt();
    xs.iter()
        .map(|x| (centre.s + x * sigma).round())
        .filter(|&m| m >= 1.0 && m <= upper as f64)
        .map(|m| m as u64)
        .collect()
}

fn rel_err(approx: f64, exact: f64) -> f64 {
    approx / exact - 1.0
}

/// Exact, Gaussian and ratio probabilities on an x grid for each `n`.
pub fn compare_csv(alpha: &AlphaParam, n_grid: &[u64], xs: &[f64], settings: &Settings, ceiling: u64) -> HarnessResult<String> {
    if n_grid.is_empty() {
        return Err(HarnessError::Usage("n grid is empty".into()));
    }
    let tables = count_tables(alpha, n_grid, ceiling)?;
    let mut spectrum = spectrum_for(alpha)?;
    let cfg = settings.solver();
    let mut out = String::from("n,m,x,p_exact,p_gauss,p_ratio,rel_err_gauss,rel_err_ratio,sigma_n,mu_n\n");
    for (table, &n) in tables.iter().zip(n_grid) {
        let centre = solve_saddle(n, None, &mut spectrum, &cfg)?;
        let (_, upper) = m_range(n, &mut spectrum)?;
        for m in grid_lengths(&centre, xs, upper) {
            let row = row_for(n, m, &centre, &mut spectrum, settings, Some(table))?;
            let p = row.p_exact.expect("table present");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                row.n,
                row.m,
                num(row.x),
                num(p),
                num(row.p_gauss),
                num(row.p_ratio),
                num(rel_err(row.p_gauss, p)),
                num(rel_err(row.p_ratio, p)),
                num(row.sigma),
                num(row.mu)
            );
        }
    }
    Ok(out)
}

const REPORT_COLUMNS: [&str; 17] = [
    "n",
    "m",
    "x",
    "q_n_exact",
    "q_n_m_exact",
    "log_q_n_exact",
    "log_q_n_asym",
    "log_q_n_m_exact",
    "log_q_n_m_asym",
    "p_exact",
    "p_gauss",
    "p_ratio",
    "mu_n",
    "sigma_n",
    "r",
    "rho",
    "error_scale",
];

/// Builds the report described by `config`, rendered in its output format.
pub fn run_report(config: &RunConfig, settings: &Settings) -> HarnessResult<String> {
    config.validate()?;
    let alpha = parse_alpha(&config.alpha)?;
    if config.compare_exact && !alpha.is_exact() {
        return Err(HarnessError::Usage(format!(
            "exact comparison requested but alpha '{}' is not a rational p/q",
            config.alpha
        )));
    }
    let within: Vec<u64> = config.n_grid.iter().copied().filter(|&n| n <= DEFAULT_CEILING).collect();
    let tables = if config.compare_exact {
        count_tables(&alpha, &within, DEFAULT_CEILING)?
    } else {
        Vec::new()
    };
    let mut spectrum = spectrum_for(&alpha)?;
    let cfg = settings.solver();
    let mut rows: Vec<Vec<(String, Value)>> = Vec::new();
    for &n in &config.n_grid {
        let table = tables.iter().find(|t| t.n == n);
        let centre = solve_saddle(n, None, &mut spectrum, &cfg)?;
        let (_, upper) = m_range(n, &mut spectrum)?;
        let ms: Vec<u64> = match &config.m_policy {
            MPolicy::Center => vec![(centre.s.round() as u64).clamp(1, upper)],
            MPolicy::XGrid { lo, hi, step } => grid_lengths(&centre, &crate::config::x_grid(*lo, *hi, *step)?, upper),
            MPolicy::Explicit(ms) => ms.clone(),
        };
        for m in ms {
            let row = row_for(n, m, &centre, &mut spectrum, settings, table)?;
            let exact_str = |v: Option<String>| v.map_or(Value::Null, Value::String);
            let exact_num = |v: Option<f64>| v.map_or(Value::Null, json_num);
            rows.push(vec![
                ("n".into(), json!(n)),
                ("m".into(), json!(m)),
                ("x".into(), json_num(row.x)),
                ("q_n_exact".into(), exact_str(table.map(|t| t.total.to_string()))),
                ("q_n_m_exact".into(), exact_str(table.map(|t| t.count(m).to_string()))),
                ("log_q_n_exact".into(), exact_num(table.map(|t| ln_biguint(&t.total)))),
                ("log_q_n_asym".into(), json_num(row.log_qn_asym)),
                ("log_q_n_m_exact".into(), exact_num(table.map(|t| ln_biguint(&t.count(m))))),
                ("log_q_n_m_asym".into(), json_num(row.log_qnm_asym)),
                ("p_exact".into(), exact_num(row.p_exact)),
                ("p_gauss".into(), json_num(row.p_gauss)),
                ("p_ratio".into(), json_num(row.p_ratio)),
                ("mu_n".into(), json_num(row.mu)),
                ("sigma_n".into(), json_num(row.sigma)),
                ("r".into(), json_num(row.r)),
                ("rho".into(), json_num(row.rho)),
                ("error_scale".into(), json_num(row.error_scale)),
            ]);
        }
    }
    let format = config.output.as_ref().map_or(Format::Csv, |o| o.format);
    Ok(match format {
        Format::Csv => render_csv(&rows),
        Format::Json => {
            let array: Vec<Value> = rows.into_iter().map(|r| Value::Object(r.into_iter().collect())).collect();
            let doc = json!({ "alpha": config.alpha, "rows": array });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
    })
}

fn render_csv(rows: &[Vec<(String, Value)>]) -> String {
    let mut out = REPORT_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|(_, v)| match v {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                Value::Number(x) => match x.as_f64() {
                    Some(f) if x.is_f64() => num(f),
                    _ => x.to_string(),
                },
                other => other.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
