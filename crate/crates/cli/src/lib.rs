//! Command line front end for `hardy-core`.
//!
//! Every subcommand resolves its settings from built-in defaults, then the
//! file named by `HILBERT_CONFIG`, then flags. The result is written as JSON
//! or CSV with a metadata header (tool version, SHA-256 of the effective
//! configuration, seed). Exit status is 0 on success, 2 when a result is
//! numerically inconclusive and 1 on any error.

pub mod commands;
pub mod config;
pub mod output;
pub mod parse;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;
use crate::output::{render, write_atomic, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Nonlinear Riesz projection and Hilbert points on Hardy spaces of the polytorus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// Quadrature tolerance (fixed-point tolerance for iterate, experiment, table1).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Trapezoid points per torus dimension.
    #[arg(long, global = true)]
    pub angular: Option<usize>,
    /// Order of the radial Gauss rule.
    #[arg(long, global = true)]
    pub radial: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Project a linear polynomial: I_j integrals, output coefficients, λ.
    Project {
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        p: Option<String>,
        /// Exact rational arithmetic (even p only).
        #[arg(long)]
        even_exact: bool,
    },
    /// Run the normalized fixed-point iteration from one start.
    Iterate {
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Seeded batch of iterations from random starts.
    Experiment {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Real positive starts instead of random phases.
        #[arg(long)]
        no_phases: bool,
    },
    /// Decide whether a polynomial is a Hilbert point.
    Check {
        /// Expression such as "z1^3+z2^3+z1*z2*z3", a CSV coefficient list or polynomial JSON.
        #[arg(long)]
        poly: String,
        /// A real p ≥ 1 or "inf".
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        exact: bool,
    },
    /// The obstruction coefficient Φ(p).
    Phi {
        #[arg(long)]
        p: Option<String>,
    },
    /// Φ on a grid.
    PhiCurve {
        #[arg(long, default_value_t = 1.0)]
        min: f64,
        #[arg(long, default_value_t = 8.0)]
        max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Equal-coefficient norms against the Khintchin bound.
    Khintchin {
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 6)]
        d_max: usize,
    },
    /// Fourier coefficients of |ζ₁+⋯+ζ_d|^{p−2}(ζ₁+⋯+ζ_d).
    Fourier {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        p: Option<String>,
        /// One exponent, e.g. "-1,-1,3"; without it a table is produced.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Largest |α_i| in a table.
        #[arg(long, default_value_t = 3)]
        range: i32,
    },
    /// The moduli trajectory at p = 1 from (0.7256, 0.6766, 0.1251).
    Table1 {
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Φ on [1, 4] by torus quadrature and on (4, 8] by the Bergman formula.
    Figure2 {
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
}

/// Parses `args` (program name first) and runs. `config` is the settings
/// file, normally taken from `HILBERT_CONFIG`.
pub fn run<I, T>(args: I, config: Option<PathBuf>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli, config: Option<PathBuf>) -> Result<i32> {
    let file = match config {
        Some(path) => ConfigFile::load(&path)?,
        None => ConfigFile::default(),
    };
    let (run_config, artifact, default_format) = commands::dispatch(&cli.command, &cli.global, &file)?;
    let format = match (cli.global.format, file.get::<String>("format")?) {
        (Some(f), _) => f,
        (None, Some(text)) => <Format as clap::ValueEnum>::from_str(&text, true)
            .map_err(|_| anyhow::anyhow!("config file: bad value {text:?} for format"))?,
        (None, None) => cli.global.out.as_deref().and_then(Format::from_path).unwrap_or(default_format),
    };
    let text = render(&run_config, &artifact, format)?;
    let mut stdout = std::io::stdout().lock();
    match &cli.global.out {
        Some(path) => {
            write_atomic(path, &text)?;
            write!(stdout, "{}", artifact.summary)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        None => write!(stdout, "{text}")?,
    }
    if artifact.inconclusive {
        for n in &artifact.notes {
            eprintln!("inconclusive: {n}");
        }
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(EXIT_OK)
}
