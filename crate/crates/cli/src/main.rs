use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phasespace::io::{save_gnuplot_matrix, save_phase_csv, write_ladders_csv};
use phasespace::moyal::cross_wigner;
use phasespace::spectral::{compare_representations, spectrum_report};
use phasespace::states::{gaussian_state, ConfigState};
use phasespace::verify::{run_suite, Suite, VerifyConfig};
use phasespace::weyl::Symbol;

#[derive(Parser)]
#[command(
    name = "phasespace",
    version,
    about = "Phase-space quantum mechanics checks and exports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print its JSON report.
    Verify {
        /// isometry, intertwining, unitarity, star, spectrum, dynamics, mixed or all
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the symbol from the config file.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Cross-Wigner function of two configuration states (JSON files).
    Wigner {
        psi: PathBuf,
        chi: PathBuf,
        /// CSV output; the gnuplot matrix goes to the same path with `.matrix` appended.
        out: PathBuf,
    },
    /// Eigenvalue ladders in the three representations.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evolve a Gaussian in the three representations and compare.
    Evolve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn load_config(path: Option<&Path>) -> Result<VerifyConfig> {
    let Some(path) = path else {
        return Ok(VerifyConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn load_state(path: &Path) -> Result<ConfigState> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify {
            suite,
            config,
            out,
            symbol,
        } => {
            let suite: Suite = suite.parse().map_err(|e| {
                usage(format!(
                    "{e}; expected one of isometry, intertwining, unitarity, star, spectrum, dynamics, mixed, all"
                ))
            })?;
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = symbol {
                cfg.symbol = s;
            }
            cfg.named_symbol().map_err(|e| usage(e.to_string()))?;
            let report = run_suite(suite, &cfg)?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                log::warn!("{} = {:.3e} exceeds {:.1e}", c.name, c.value, c.tolerance);
            }
            emit(&json(&report)?, out.as_deref())?;
            Ok(report.pass)
        }
        Command::Wigner { psi, chi, out } => {
            let psi = load_state(&psi)?;
            let chi = load_state(&chi)?;
            let w = cross_wigner(&psi, &chi)?;
            save_phase_csv(&w, &out)?;
            let mut matrix = out.into_os_string();
            matrix.push(".matrix");
            save_gnuplot_matrix(&w, Path::new(&matrix))?;
            Ok(true)
        }
        Command::Spectrum { config, out, format } => {
            let cfg = load_config(config.as_deref())?;
            let s = cfg.named_symbol().map_err(|e| usage(e.to_string()))?;
            let a = Symbol::named(&cfg.grid()?, s)?;
            let report = spectrum_report(s.name(), &a, &cfg.window_state()?)?;
            let text = match format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_ladders_csv(&report.eigenvalues, &mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(&text, out.as_deref())?;
            Ok(!report.discrete || report.distances.iter().all(|d| *d < 1e-6))
        }
        Command::Evolve { config, out } => {
            let cfg = load_config(config.as_deref())?;
            let Some(t) = cfg.t else {
                bail!(usage("evolve needs `t` in the config"));
            };
            let s = cfg.named_symbol().map_err(|e| usage(e.to_string()))?;
            let g = cfg.grid()?;
            let a = Symbol::named(&g, s)?;
            let psi0 = gaussian_state(g.x(), 1.0, 0.5, 1.0)?;
            let report = compare_representations(s.name(), &a, &cfg.window_state()?, t, &psi0)?;
            emit(&json(&report)?, out.as_deref())?;
            Ok(report.distances.iter().all(|d| *d < 1e-6))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
