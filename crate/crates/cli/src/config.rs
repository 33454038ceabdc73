//! Command-line flags and the validated experiment configuration.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use fastast::{SolverConfig, Variant};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Monte Carlo trials at one (N, SNR) point.
    Solve,
    /// Trials over a list of N at one SNR.
    #[value(name = "sweep-N", alias = "sweep-n")]
    SweepN,
    /// Trials over a list of SNR values at one N.
    #[value(name = "sweep-SNR", alias = "sweep-snr")]
    SweepSnr,
    /// Per-iteration convergence trace of a single instance.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Newton,
    Lbfgs,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "fastast", version, about = "Atomic norm soft thresholding benchmark harness")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "solve")]
    pub mode: Mode,
    /// Problem size(s), comma separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "64")]
    pub n: Vec<usize>,
    /// Signal-to-noise ratio(s) in dB, comma separated.
    #[arg(long = "snr-db", value_delimiter = ',', default_value = "20", allow_hyphen_values = true)]
    pub snr_db: Vec<f64>,
    /// Number of sinusoids, or `auto` for round(N / 10).
    #[arg(long, default_value = "auto")]
    pub k: String,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "lbfgs")]
    pub variant: VariantArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Reference solution for trace mode; computed and written when missing.
    #[arg(long = "trace-ref")]
    pub trace_ref: Option<PathBuf>,
    #[arg(long = "tol-abs")]
    pub tol_abs: Option<f64>,
    #[arg(long = "tol-rel")]
    pub tol_rel: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// L-BFGS memory (default 2N - 1).
    #[arg(long)]
    pub memory: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    Fixed(usize),
    /// `round(N / 10)`.
    Auto,
}

impl KRule {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            KRule::Fixed(k) => k,
            KRule::Auto => (n as f64 / 10.0).round() as usize,
        }
    }
}

/// Solver settings that override the per-variant defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverOverrides {
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
    pub gamma: Option<f64>,
    pub memory: Option<usize>,
}

impl SolverOverrides {
    pub fn apply(&self, variant: Variant) -> SolverConfig {
        let mut cfg = SolverConfig::for_variant(variant);
        if let Some(v) = self.tol_abs {
            cfg.tol_abs = v;
        }
        if let Some(v) = self.tol_rel {
            cfg.tol_rel = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if self.memory.is_some() {
            cfg.memory = self.memory;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub ns: Vec<usize>,
    pub snrs: Vec<f64>,
    pub k: KRule,
    pub trials: usize,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub out: PathBuf,
    pub format: Format,
    pub jobs: usize,
    pub trace_ref: Option<PathBuf>,
    pub overrides: SolverOverrides,
}

impl ExperimentConfig {
    /// Per-variant solver configuration.
    pub fn solver(&self, variant: Variant) -> SolverConfig {
        self.overrides.apply(variant)
    }
}

impl TryFrom<Cli> for ExperimentConfig {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        let err = |m: String| Err(CliError::Config(m));
        let k = match cli.k.trim() {
            "auto" => KRule::Auto,
            s => match s.parse() {
                Ok(k) => KRule::Fixed(k),
                Err(_) => return err(format!("--k must be a nonnegative integer or `auto`, got `{s}`")),
            },
        };
        if cli.trials == 0 {
            return err("--trials must be at least 1".into());
        }
        if cli.n.is_empty() || cli.n.iter().any(|&n| n < 2) {
            return err("--n values must be at least 2".into());
        }
        if cli.snr_db.is_empty() || cli.snr_db.iter().any(|s| !s.is_finite()) {
            return err("--snr-db values must be finite".into());
        }
        match cli.mode {
            Mode::Solve | Mode::Trace if cli.n.len() != 1 || cli.snr_db.len() != 1 => {
                return err("solve and trace modes take a single --n and --snr-db".into());
            }
            Mode::SweepN if cli.snr_db.len() != 1 => {
                return err("sweep-N takes a single --snr-db".into());
            }
            Mode::SweepSnr if cli.n.len() != 1 => {
                return err("sweep-SNR takes a single --n".into());
            }
            _ => {}
        }
        if cli.trace_ref.is_some() && cli.mode != Mode::Trace {
            return err("--trace-ref is only used in trace mode".into());
        }
        let variants = match cli.variant {
            VariantArg::Newton => vec![Variant::Newton],
            VariantArg::Lbfgs => vec![Variant::Lbfgs],
            VariantArg::Both => vec![Variant::Newton, Variant::Lbfgs],
        };
        let overrides = SolverOverrides {
            tol_abs: cli.tol_abs,
            tol_rel: cli.tol_rel,
            gamma: cli.gamma,
            memory: cli.memory,
        };
        for &v in &variants {
            overrides
                .apply(v)
                .validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(ExperimentConfig {
            mode: cli.mode,
            ns: cli.n,
            snrs: cli.snr_db,
            k,
            trials: cli.trials,
            seed: cli.seed,
            variants,
            out: cli.out,
            format: cli.format,
            jobs: cli.jobs,
            trace_ref: cli.trace_ref,
            overrides,
        })
    }
}
