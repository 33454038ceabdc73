//! Benchmark harness for the `fastast` solver: synthetic line spectral
//! estimation problems, Monte Carlo sweeps over `N` and SNR, and
//! per-iteration convergence traces.
//!
//! Results table columns:
//! `trial,n,snr_db,variant,iters,wall_ms,gap,f_obj,nmse,oracle_nmse,success,freq_mse,status`.
//! Trace columns: `iter,f_obj,gap,step_alpha,dual_feasible,err_to_ref`.
//! `wall_ms` is the only non-reproducible column.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod output;
pub mod trace;

use std::process::ExitCode;

use config::{ExperimentConfig, Mode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("could not place {k} frequencies with the required separation for N = {n}")]
    Generate { n: usize, k: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Solver(#[from] fastast::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => 1,
        }
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_ABORTED: u8 = 3;

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rows: usize,
    pub aborted: usize,
    pub files: Vec<std::path::PathBuf>,
}

impl RunSummary {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(if self.aborted > 0 { EXIT_ABORTED } else { EXIT_OK })
    }
}

/// Executes a validated configuration and writes its output files.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, CliError> {
    match config.mode {
        Mode::Trace => run_trace(config),
        _ => {
            let rows = experiment::run_trials(config)?;
            output::write_rows(&config.out, &rows, config.format)?;
            Ok(RunSummary {
                rows: rows.len(),
                aborted: rows.iter().filter(|r| !r.converged()).count(),
                files: vec![config.out.clone()],
            })
        }
    }
}

fn run_trace(config: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let n = config.ns[0];
    let problem = generate::generate_problem(
        n,
        config.k.resolve(n),
        config.snrs[0],
        experiment::trial_seed(config.seed, 0),
    )?;
    let reference = match &config.trace_ref {
        Some(path) => Some(trace::load_or_compute_reference(path, &problem)?.to_primal()?),
        None => None,
    };
    let mut summary = RunSummary {
        rows: 0,
        aborted: 0,
        files: Vec::new(),
    };
    for &variant in &config.variants {
        let path = if config.variants.len() > 1 {
            output::with_suffix(&config.out, variant.name())
        } else {
            config.out.clone()
        };
        let (rows, converged) = match trace::trace_problem(&problem, &config.solver(variant), reference.as_ref()) {
            Ok((rows, res)) => (rows, res.status.converged()),
            Err(CliError::Solver(e)) => {
                eprintln!("{variant}: solver aborted: {e}");
                (Vec::new(), false)
            }
            Err(e) => return Err(e),
        };
        output::write_rows(&path, &rows, config.format)?;
        summary.rows += rows.len();
        summary.aborted += usize::from(!converged);
        summary.files.push(path);
    }
    Ok(summary)
}

