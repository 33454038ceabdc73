//! Monte Carlo trials: generate, solve, estimate, score.

use std::time::Instant;

use fastast::lse::{self, LineSpectralProblem};
use fastast::solver::solve_ast;
use fastast::{SolverConfig, SolverResult, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::generate::generate_problem;
use crate::CliError;

/// One row of the results table. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub snr_db: f64,
    pub variant: String,
    pub iters: usize,
    /// Solver wall time; not reproducible.
    pub wall_ms: f64,
    pub gap: f64,
    pub f_obj: f64,
    pub nmse: f64,
    pub oracle_nmse: f64,
    pub success: bool,
    pub freq_mse: Option<f64>,
    pub status: String,
}

impl TrialRecord {
    /// True when the solver reached one of its gap tolerances.
    pub fn converged(&self) -> bool {
        self.status == "gap_abs" || self.status == "gap_rel"
    }
}

/// Fully scored outcome of one solve, for callers that need more than a row.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub problem: LineSpectralProblem,
    pub result: Option<SolverResult>,
}

/// `seed + trial`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// Solves `problem` with one variant and scores the debiased estimate.
pub fn solve_problem(
    problem: &LineSpectralProblem,
    trial: usize,
    snr_db: f64,
    variant: Variant,
    config: &SolverConfig,
) -> TrialOutcome {
    let tau = lse::select_tau(problem.n, problem.noise_var.sqrt());
    let oracle = lse::oracle_estimate(problem);
    let oracle_nmse = lse::nmse(&oracle.signal, &problem.signal);
    let start = Instant::now();
    let solved = solve_ast(&problem.y, tau, config);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut record = TrialRecord {
        trial,
        n: problem.n,
        snr_db,
        variant: variant.name().to_string(),
        iters: 0,
        wall_ms,
        gap: f64::NAN,
        f_obj: f64::NAN,
        nmse: f64::NAN,
        oracle_nmse,
        success: false,
        freq_mse: None,
        status: String::new(),
    };
    match solved {
        Ok(res) => {
            let est = lse::estimate(&res.primal.x, &problem.y, tau);
            let m = lse::metrics(&est, problem);
            record.iters = res.iterations;
            record.gap = res.gap;
            record.f_obj = res.f_obj;
            record.nmse = m.nmse;
            record.success = m.success;
            record.freq_mse = m.freq_mse;
            record.status = res.status.name().to_string();
            TrialOutcome {
                record,
                problem: problem.clone(),
                result: Some(res),
            }
        }
        Err(e) => {
            record.status = format!("error: {e}");
            TrialOutcome {
                record,
                problem: problem.clone(),
                result: None,
            }
        }
    }
}

/// One `(N, SNR, trial)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Task {
    n: usize,
    snr_db: f64,
    trial: usize,
}

fn tasks(config: &ExperimentConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for &n in &config.ns {
        for &snr_db in &config.snrs {
            for trial in 0..config.trials {
                out.push(Task { n, snr_db, trial });
            }
        }
    }
    out
}

fn run_task(config: &ExperimentConfig, task: Task) -> Vec<TrialRecord> {
    let k = config.k.resolve(task.n);
    let seed = trial_seed(config.seed, task.trial);
    match generate_problem(task.n, k, task.snr_db, seed) {
        Ok(problem) => config
            .variants
            .iter()
            .map(|&v| solve_problem(&problem, task.trial, task.snr_db, v, &config.solver(v)).record)
            .collect(),
        Err(e) => config
            .variants
            .iter()
            .map(|&v| TrialRecord {
                trial: task.trial,
                n: task.n,
                snr_db: task.snr_db,
                variant: v.name().to_string(),
                iters: 0,
                wall_ms: 0.0,
                gap: f64::NAN,
                f_obj: f64::NAN,
                nmse: f64::NAN,
                oracle_nmse: f64::NAN,
                success: false,
                freq_mse: None,
                status: format!("error: {e}"),
            })
            .collect(),
    }
}

/// Runs every `(N, SNR, trial, variant)` combination. Rows come back in a
/// fixed order regardless of `jobs`.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>, CliError> {
    let tasks = tasks(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<TrialRecord>> =
        pool.install(|| tasks.par_iter().map(|&t| run_task(config, t)).collect());
    Ok(rows.into_iter().flatten().collect())
}
