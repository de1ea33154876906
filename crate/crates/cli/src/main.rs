mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modzeta::config::ExperimentConfig;
use modzeta::error::Error;

#[derive(Parser)]
#[command(name = "modzeta", version, about = "Modified zeta functions, frequency sets and frame operators")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Prime selector, e.g. `all`, `exclude:2,3`, `mod:1,4`, `construct:6a:delta=0.1`.
    #[arg(long = "primes", global = true)]
    selector: Option<String>,
    /// Generation bound.
    #[arg(long = "X", global = true)]
    x: Option<u64>,
    /// Half-length of the interval (−T, T).
    #[arg(long = "T", global = true)]
    t: Option<f64>,
    /// Basis size (odd).
    #[arg(long = "M", global = true)]
    m: Option<usize>,
    /// Cutoff of the frame-operator sum.
    #[arg(long = "N", global = true)]
    n: Option<u64>,
    /// Comma-separated δ ladder.
    #[arg(long, global = true)]
    deltas: Option<String>,
    /// Comma-separated exponents q.
    #[arg(long = "q", global = true)]
    qs: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the summary as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Run every loop sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate the semigroup up to X and write its elements.
    Semigroup,
    /// Density A from the Euler product over the complement.
    Density {
        #[arg(long, default_value_t = 1e-10)]
        precision: f64,
    },
    /// Re ζ_K(1+δ+it) on a grid of t, split into the Poisson term and the remainder.
    Zeta {
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.5)]
        t_step: f64,
        /// Density used in the Poisson term; defaults to the Euler product.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Frequency-set window measures and the counting ratio check.
    Panejah {
        /// Window length in frequency units.
        #[arg(long, default_value_t = 1.0)]
        window: f64,
        #[arg(long, default_value_t = 0.25)]
        xi_step: f64,
        /// δ of the counting ratio (π_K(x) − π_K(δx))/x.
        #[arg(long, default_value_t = 0.5)]
        check_delta: f64,
        #[arg(long)]
        a: Option<f64>,
    },
    /// Frame-operator matrix spectrum on (−T, T).
    Spectrum {
        #[arg(long)]
        a_ref: Option<f64>,
        #[arg(long, value_enum, default_value_t = TailArg::Auto)]
        tail: TailArg,
        /// Also compare with the band-restriction matrix.
        #[arg(long)]
        band_compare: bool,
    },
    /// Build a counterexample prime set and verify it.
    Construct {
        #[arg(value_enum)]
        which: Which,
        /// Construction parameters, e.g. `delta=0.1,base=10,ratio=2` or `k0=2,policy=cap`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0.5)]
        check_delta: f64,
    },
    /// L^q norm ladders and summability scans.
    Lpscan {
        #[arg(long)]
        a: Option<f64>,
        /// Weight: loglog, logpow:E, omega or log1p-log.
        #[arg(long, default_value = "loglog")]
        weight: String,
        /// Comma-separated cut-offs P0; defaults to powers of ten up to X.
        #[arg(long)]
        p0: Option<String>,
        /// Weight of the weighted-sum inequality over the complementary semigroup.
        #[arg(long, default_value = "omega")]
        malliavin_weight: String,
        #[arg(long, default_value_t = 1.5)]
        sigma: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Run the acceptance battery and write a summary.
    Suite {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TailArg {
    Auto,
    Truncate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Which {
    #[value(name = "6a")]
    Windows,
    #[value(name = "6b")]
    Dyadic,
}

pub fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| Error::Input(format!("invalid value `{v}` in --{key}"))))
        .collect()
}

fn build_config(c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::parse(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = &c.selector {
        cfg.selector = s.clone();
    }
    if let Some(x) = c.x {
        cfg.x = x;
    }
    if let Some(t) = c.t {
        cfg.t = t;
    }
    if let Some(m) = c.m {
        cfg.m = m;
    }
    if let Some(n) = c.n {
        cfg.n = n;
    }
    if let Some(d) = &c.deltas {
        cfg.deltas = parse_list("deltas", d)?;
    }
    if let Some(q) = &c.qs {
        cfg.qs = parse_list("q", q)?;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if c.n.is_none() && cfg.n > cfg.x {
        cfg.n = cfg.x;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli.command, &cfg, &cli.common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Input(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            output::diagnostic(&cfg, &e);
            ExitCode::from(1)
        }
    }
}
