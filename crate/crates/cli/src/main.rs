use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use powpart_cli::commands::{asym_output, compare_csv, exact_output, parse_alpha, run_report, saddle_output, spectrum_csv};
use powpart_cli::config::{parse_x_range, Format, RunConfig, Settings};
use powpart_cli::selftest::{run_suite, Suite};
use powpart_cli::{HarnessError, HarnessResult};
use powpart_core::exact::DEFAULT_CEILING;

#[derive(Parser)]
#[command(name = "powpart", version, about = "Restricted partitions into parts floor(a^alpha)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Part multiplicities g(k) as CSV
    Spectrum {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        kmax: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact q(n, m) for every m
    Exact {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_CEILING)]
        ceiling: u64,
    },
    /// Saddle point (r, rho) and the scale factors
    Saddle {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Asymptotic estimates of q(n) and q(n, m)
    Asym {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Exact against Gaussian and ratio probabilities on an x grid
    Compare {
        #[arg(long)]
        alpha: String,
        /// Comma separated, e.g. 250,500,1000
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<u64>,
        /// lo:hi:step
        #[arg(long, allow_hyphen_values = true)]
        x_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report driven by a JSON config
    Report {
        #[arg(long)]
        config: PathBuf,
    },
    /// Built-in invariant checks
    Selftest {
        #[arg(value_enum)]
        suite: Suite,
    },
}

fn emit(text: &str, out: Option<&Path>) -> HarnessResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> HarnessResult<()> {
    let settings = Settings::default().with_env()?;
    match cli.command {
        Command::Spectrum { alpha, kmax, out } => emit(&spectrum_csv(&parse_alpha(&alpha)?, kmax)?, out.as_deref()),
        Command::Exact {
            alpha,
            n,
            out,
            format,
            ceiling,
        } => emit(&exact_output(&parse_alpha(&alpha)?, n, format, ceiling)?, out.as_deref()),
        Command::Saddle { alpha, n, m, json } => emit(&saddle_output(&parse_alpha(&alpha)?, n, m, json, &settings)?, None),
        Command::Asym { alpha, n, m } => emit(&asym_output(&parse_alpha(&alpha)?, n, m, &settings)?, None),
        Command::Compare {
            alpha,
            n_grid,
            x_range,
            out,
        } => {
            let xs = parse_x_range(&x_range)?;
            let text = compare_csv(&parse_alpha(&alpha)?, &n_grid, &xs, &settings, DEFAULT_CEILING)?;
            emit(&text, out.as_deref())
        }
        Command::Report { config } => {
            let config = RunConfig::load(&config)?;
            let settings = config.settings()?.with_env()?;
            let text = run_report(&config, &settings)?;
            emit(&text, config.output.as_ref().and_then(|o| o.path.as_deref()))
        }
        Command::Selftest { suite } => {
            let (text, ok) = run_suite(suite);
            print!("{text}");
            if ok {
                Ok(())
            } else {
                Err(HarnessError::SelfTest(suite.name().into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("powpart: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
