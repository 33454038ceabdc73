//! Convergence traces against a high-accuracy reference solution.

use std::path::Path;

use fastast::lse::{self, LineSpectralProblem};
use fastast::objective::ObjectiveContext;
use fastast::solver::solve_with_observer;
use fastast::toeplitz::ToeplitzParam;
use fastast::{PrimalPoint, SolverConfig, SolverResult, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Primal solution `(v, x, u)` as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub n: usize,
    pub v: f64,
    pub x_re: Vec<f64>,
    pub x_im: Vec<f64>,
    pub u: Vec<f64>,
}

impl ReferenceSolution {
    pub fn from_primal(mu: &PrimalPoint) -> Self {
        ReferenceSolution {
            n: mu.n(),
            v: mu.v,
            x_re: mu.x.iter().map(|c| c.re).collect(),
            x_im: mu.x.iter().map(|c| c.im).collect(),
            u: mu.u.as_slice().to_vec(),
        }
    }

    pub fn to_primal(&self) -> Result<PrimalPoint, CliError> {
        let n = self.n;
        if self.x_re.len() != n || self.x_im.len() != n {
            return Err(CliError::Config("reference x has the wrong length".into()));
        }
        let u = ToeplitzParam::with_size(n, self.u.clone())
            .map_err(|e| CliError::Config(format!("reference u: {e}")))?;
        let x = self.x_re.iter().zip(&self.x_im).map(|(&r, &i)| C64::new(r, i)).collect();
        Ok(PrimalPoint { v: self.v, x, u })
    }
}

/// One row of a trace file. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub f_obj: f64,
    pub gap: f64,
    pub step_alpha: f64,
    pub dual_feasible: bool,
    /// `||mu_i - mu_ref||^2`, when a reference is available.
    pub err_to_ref: Option<f64>,
}

/// Newton settings for reference solutions: stop at a relative gap of 1e-10.
pub fn reference_config() -> SolverConfig {
    SolverConfig {
        tol_abs: 0.0,
        tol_rel: 1e-10,
        max_iters: 500,
        ..SolverConfig::newton()
    }
}

/// Regularization weight used for a generated problem.
pub fn problem_tau(problem: &LineSpectralProblem) -> f64 {
    lse::select_tau(problem.n, problem.noise_var.sqrt())
}

pub fn compute_reference(problem: &LineSpectralProblem) -> Result<ReferenceSolution, CliError> {
    let ctx = ObjectiveContext::ast(problem.y.clone(), problem_tau(problem))?;
    let res = solve_with_observer(&ctx, &reference_config(), |_, _| {})?;
    Ok(ReferenceSolution::from_primal(&res.primal))
}

/// Reads the reference at `path`, or computes it and writes it there.
pub fn load_or_compute_reference(
    path: &Path,
    problem: &LineSpectralProblem,
) -> Result<ReferenceSolution, CliError> {
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let r: ReferenceSolution = serde_json::from_str(&text)?;
        if r.n != problem.n {
            return Err(CliError::Config(format!(
                "reference solution has N = {}, problem has N = {}",
                r.n, problem.n
            )));
        }
        Ok(r)
    } else {
        let r = compute_reference(problem)?;
        crate::output::write_atomic(path, serde_json::to_string_pretty(&r)?.as_bytes())?;
        Ok(r)
    }
}

/// Solves `problem` recording one [`TraceRow`] per iteration.
pub fn trace_problem(
    problem: &LineSpectralProblem,
    config: &SolverConfig,
    reference: Option<&PrimalPoint>,
) -> Result<(Vec<TraceRow>, SolverResult), CliError> {
    let ctx = ObjectiveContext::ast(problem.y.clone(), problem_tau(problem))?;
    let mut rows = Vec::new();
    let res = solve_with_observer(&ctx, config, |rec, mu| {
        rows.push(TraceRow {
            iter: rec.iter,
            f_obj: rec.f_obj,
            gap: rec.gap,
            step_alpha: rec.step_alpha,
            dual_feasible: rec.dual_feasible,
            err_to_ref: reference.map(|r| mu.distance_sq(r)),
        });
    })?;
    Ok((rows, res))
}
