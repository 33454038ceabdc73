//! Primal-dual interior-point driver.
//!
//! Each iteration takes a Newton or modified L-BFGS step on `h_t(u)`,
//! backtracks until the trial point is strictly feasible and satisfies the
//! Armijo rule, recovers `(mu, lambda)` from the accepted `u`, tightens the
//! lower bound when `lambda` is dual feasible and then raises `t` so that
//! the next target gap is `eta / gamma`.

mod lbfgs;

use std::time::{Duration, Instant};

use nalgebra::DVector;

use crate::cones::{default_grid, in_dual_autocorr, in_dual_cone_with_grid, DUAL_TOL};
use crate::objective::{Gradients, Iterate, ObjectiveContext};
use crate::toeplitz::ToeplitzParam;
use crate::{DualPoint, Error, PrimalPoint, Result, C64};

pub use lbfgs::History;

/// Search direction used by the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Newton,
    Lbfgs,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Newton => "newton",
            Variant::Lbfgs => "lbfgs",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    /// L-BFGS memory; `None` means `2N - 1`.
    pub memory: Option<usize>,
    pub armijo_c: f64,
    pub gamma: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iters: usize,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Sampling grid of the dual-cone test; `None` means `16 next_pow2(N)`.
    pub dual_grid: Option<usize>,
    pub dual_tol: f64,
}

impl SolverConfig {
    pub fn newton() -> Self {
        SolverConfig {
            variant: Variant::Newton,
            memory: None,
            armijo_c: 0.05,
            gamma: 10.0,
            tol_abs: 1e-7,
            tol_rel: 1e-7,
            max_iters: 200,
            backtrack_factor: 0.5,
            max_backtracks: 60,
            dual_grid: None,
            dual_tol: DUAL_TOL,
        }
    }

    pub fn lbfgs() -> Self {
        SolverConfig {
            variant: Variant::Lbfgs,
            gamma: 2.0,
            tol_abs: 1e-4,
            tol_rel: 1e-4,
            max_iters: 1000,
            ..Self::newton()
        }
    }

    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::Newton => Self::newton(),
            Variant::Lbfgs => Self::lbfgs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo constant must lie in (0, 1)");
        }
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return bad("gamma must be greater than 1");
        }
        if !(self.tol_abs >= 0.0 && self.tol_rel >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack factor must lie in (0, 1)");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if self.memory == Some(0) && self.variant == Variant::Lbfgs {
            return bad("L-BFGS memory must be positive");
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::lbfgs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// `f - f_LB < tol_abs`.
    GapAbs,
    /// `(f - f_LB) / f < tol_rel`.
    GapRel,
    MaxIters,
    /// No acceptable step within `max_backtracks` halvings.
    LineSearchStall,
}

impl Status {
    pub fn converged(self) -> bool {
        matches!(self, Status::GapAbs | Status::GapRel)
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::GapAbs => "gap_abs",
            Status::GapRel => "gap_rel",
            Status::MaxIters => "max_iters",
            Status::LineSearchStall => "line_search_stall",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One accepted iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// Barrier parameter used for the step.
    pub t: f64,
    pub f_obj: f64,
    pub f_lb: f64,
    pub gap: f64,
    pub step_alpha: f64,
    pub backtracks: usize,
    pub dual_feasible: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub primal: PrimalPoint,
    /// Dual point recovered at the final iterate.
    pub dual: DualPoint,
    /// Dual point that certifies `f_lb`.
    pub certificate: DualPoint,
    pub f_obj: f64,
    pub f_lb: f64,
    pub gap: f64,
    pub t: f64,
    pub status: Status,
    pub iterations: usize,
    /// Doublings of `u_0` needed by the initialization.
    pub init_doublings: usize,
    pub trace: Vec<IterationRecord>,
}

/// `tau = 0`, or `tau > 0` with `w` in `C*`.
pub fn check_solvable(tau: f64, w: &[f64]) -> bool {
    tau == 0.0 || (tau > 0.0 && in_dual_autocorr(w, DUAL_TOL))
}

/// `max(t, gamma (N + 1) / eta)`.
pub fn update_barrier(t: f64, eta: f64, gamma: f64, n: usize) -> f64 {
    let target = gamma * (n as f64 + 1.0) / eta;
    if target.is_nan() {
        t
    } else {
        t.max(target)
    }
}

/// Outcome of [`initialize`].
#[derive(Debug, Clone)]
pub struct Initialization {
    pub iterate: Iterate,
    pub t: f64,
    pub primal: PrimalPoint,
    pub dual: DualPoint,
    pub f_lb: f64,
    pub doublings: usize,
}

const MAX_DOUBLINGS: usize = 64;

/// Finds a primal-dual feasible start by doubling the first entry of
/// `u = (10 ||y||^2 / N, 0, ..., 0)` until the recovered `lambda` is in `K*`,
/// then picks `t_1` with `t_1 = gamma (N + 1) / <lambda, mu(t_1)>`.
pub fn initialize(ctx: &ObjectiveContext, config: &SolverConfig) -> Result<Initialization> {
    let n = ctx.n();
    let grid = config.dual_grid.unwrap_or_else(|| default_grid(n));
    let energy: f64 = ctx.y().iter().map(|c| c.norm_sqr()).sum();
    let mut u0 = 10.0 * energy / n as f64;
    if !(u0 > 0.0) || !u0.is_finite() {
        u0 = 1.0;
    }
    let want_chol = config.variant == Variant::Newton;
    for doublings in 0..=MAX_DOUBLINGS {
        let u = ToeplitzParam::scaled_identity(n, u0);
        let it = ctx.evaluate(&u, want_chol)?;
        // x does not depend on t; only v does, through 1/(tau t).
        let base = ctx.recover_primal(&it, f64::INFINITY);
        let dual = ctx.recover_dual(&base.x);
        if in_dual_cone_with_grid(&dual, grid, config.dual_tol) {
            let theta = n as f64 + 1.0;
            let eta_base = dual.inner(&base);
            let t = if eta_base > 0.0 {
                (config.gamma * theta - 1.0) / eta_base
            } else {
                config.gamma * theta
            };
            let primal = ctx.recover_primal(&it, t);
            let f_lb = ctx.dual_objective(&dual);
            return Ok(Initialization {
                iterate: it,
                t,
                primal,
                dual,
                f_lb,
                doublings,
            });
        }
        u0 *= 2.0;
    }
    Err(Error::InitializationFailed(MAX_DOUBLINGS))
}

/// `-(grad^2 h_t)^{-1} grad h_t` by a dense Cholesky solve.
pub fn newton_direction(
    ctx: &ObjectiveContext,
    it: &Iterate,
    grad: &[f64],
    t: f64,
    iteration: usize,
) -> Result<Vec<f64>> {
    let h = ctx.hessian_full_at(it, t)?;
    let chol = h.cholesky().ok_or(Error::IndefiniteHessian { iteration })?;
    let rhs = DVector::from_iterator(grad.len(), grad.iter().map(|g| -g));
    let du = chol.solve(&rhs);
    if du.iter().any(|v| !v.is_finite()) {
        return Err(Error::IndefiniteHessian { iteration });
    }
    Ok(du.iter().copied().collect())
}

/// Accepted trial of a backtracking line search.
#[derive(Debug, Clone)]
pub struct LineSearchStep {
    pub alpha: f64,
    pub backtracks: usize,
    pub iterate: Iterate,
}

/// Backtracking from `alpha = 1` until `u + alpha du` is in `int C` and
/// `h_t` satisfies the Armijo condition. `None` after `max_backtracks`
/// reductions.
pub fn line_search(
    ctx: &ObjectiveContext,
    it: &Iterate,
    grad: &[f64],
    du: &[f64],
    t: f64,
    config: &SolverConfig,
) -> Result<Option<LineSearchStep>> {
    let want_chol = config.variant == Variant::Newton;
    let h0 = it.value(t);
    let slope: f64 = grad.iter().zip(du).map(|(g, d)| g * d).sum();
    // Allow round-off in the comparison once the decrease drops below it.
    let slack = 8.0 * f64::EPSILON * (it.g.abs() + it.barrier.abs() / t);
    let mut alpha = 1.0;
    for backtracks in 0..=config.max_backtracks {
        let trial = it.u.offset(alpha, du);
        match ctx.evaluate(&trial, want_chol) {
            Ok(next) => {
                let h = next.value(t);
                if h.is_finite() && h <= h0 + config.armijo_c * alpha * slope + slack {
                    return Ok(Some(LineSearchStep {
                        alpha,
                        backtracks,
                        iterate: next,
                    }));
                }
            }
            Err(Error::NotPositiveDefinite(_)) => {}
            Err(e) => return Err(e),
        }
        alpha *= config.backtrack_factor;
    }
    Ok(None)
}

/// Runs the interior-point method on the AST problem `w = 2 e_0`.
pub fn solve_ast(y: &[C64], tau: f64, config: &SolverConfig) -> Result<SolverResult> {
    let ctx = ObjectiveContext::ast(y.to_vec(), tau)?;
    solve_with_observer(&ctx, config, |_, _| {})
}

/// Runs the interior-point method on general weights `w`.
pub fn solve(y: &[C64], tau: f64, w: &[f64], config: &SolverConfig) -> Result<SolverResult> {
    if !check_solvable(tau, w) {
        return Err(Error::NotSolvable("tau must be positive and w a finite autocorrelation sequence"));
    }
    let ctx = ObjectiveContext::new(y.to_vec(), tau, w.to_vec())?;
    solve_with_observer(&ctx, config, |_, _| {})
}

/// As [`solve`], calling `observer` after every accepted iteration with its
/// record and the recovered primal point.
pub fn solve_with_observer<F>(
    ctx: &ObjectiveContext,
    config: &SolverConfig,
    mut observer: F,
) -> Result<SolverResult>
where
    F: FnMut(&IterationRecord, &PrimalPoint),
{
    config.validate()?;
    if !check_solvable(ctx.tau(), ctx.w()) {
        return Err(Error::NotSolvable("w is not a finite autocorrelation sequence"));
    }
    let start = Instant::now();
    let n = ctx.n();
    let grid = config.dual_grid.unwrap_or_else(|| default_grid(n));

    let init = initialize(ctx, config)?;
    let mut it = init.iterate;
    let mut t = init.t;
    let mut f_lb = init.f_lb;
    let mut certificate = init.dual.clone();
    let mut grads = ctx.gradients(&it);
    let mut history = History::new(config.memory.unwrap_or(2 * n - 1));

    let mut trace = Vec::new();
    let mut last_primal = init.primal;
    let mut last_dual = init.dual;
    let mut f_obj = ctx.primal_objective(&last_primal);
    let mut gap = f_obj - f_lb;
    let mut status = Status::MaxIters;

    for iter in 1..=config.max_iters {
        let grad = grads.combine(t);
        let step = match config.variant {
            Variant::Newton => {
                let du = newton_direction(ctx, &it, &grad, t, iter)?;
                line_search(ctx, &it, &grad, &du, t, config)?
            }
            Variant::Lbfgs => lbfgs_step(ctx, &it, &grad, t, &mut history, config)?,
        };
        let Some(step) = step else {
            status = Status::LineSearchStall;
            break;
        };

        let next = step.iterate;
        let next_grads = ctx.gradients(&next);
        if config.variant == Variant::Lbfgs {
            let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
            history.push(
                sub(next.u.as_slice(), it.u.as_slice()),
                sub(&next_grads.g, &grads.g),
                sub(&next_grads.barrier, &grads.barrier),
            );
        }
        it = next;
        grads = next_grads;

        let primal = ctx.recover_primal(&it, t);
        let dual = ctx.recover_dual(&primal.x);
        let dual_feasible = in_dual_cone_with_grid(&dual, grid, config.dual_tol);
        if dual_feasible {
            let bound = ctx.dual_objective(&dual);
            if bound > f_lb {
                f_lb = bound;
                certificate = dual.clone();
            }
        }
        f_obj = ctx.primal_objective(&primal);
        gap = f_obj - f_lb;

        let record = IterationRecord {
            iter,
            t,
            f_obj,
            f_lb,
            gap,
            step_alpha: step.alpha,
            backtracks: step.backtracks,
            dual_feasible,
            elapsed: start.elapsed(),
        };
        observer(&record, &primal);
        trace.push(record);
        last_primal = primal;
        last_dual = dual;

        if gap < config.tol_abs {
            status = Status::GapAbs;
            break;
        }
        if gap / f_obj < config.tol_rel {
            status = Status::GapRel;
            break;
        }
        t = update_barrier(t, gap, config.gamma, n);
    }

    Ok(SolverResult {
        primal: last_primal,
        dual: last_dual,
        certificate,
        f_obj,
        f_lb,
        gap,
        t,
        status,
        iterations: trace.len(),
        init_doublings: init.doublings,
        trace,
    })
}

/// L-BFGS direction and line search; when the quasi-Newton step cannot be
/// accepted the history is discarded and scaled steepest descent is tried.
fn lbfgs_step(
    ctx: &ObjectiveContext,
    it: &Iterate,
    grad: &[f64],
    t: f64,
    history: &mut History,
    config: &SolverConfig,
) -> Result<Option<LineSearchStep>> {
    let h_diag = ctx.hessian_diag_approx_at(it, t);
    let du = history.direction(grad, t, &h_diag);
    let descent: f64 = du.iter().zip(grad).map(|(d, g)| d * g).sum();
    if descent < 0.0 {
        if let Some(step) = line_search(ctx, it, grad, &du, t, config)? {
            return Ok(Some(step));
        }
    }
    if history.is_empty() {
        return Ok(None);
    }
    history.clear();
    let du = history.direction(grad, t, &h_diag);
    line_search(ctx, it, grad, &du, t, config)
}

/// Minimizes `h_t` at a frozen `t` by damped Newton steps from `u0`, until
/// `||grad h_t||_inf <= grad_tol` or `max_iters` steps. Returns the final
/// iterate and its gradient residual.
pub fn center(
    ctx: &ObjectiveContext,
    u0: &ToeplitzParam,
    t: f64,
    grad_tol: f64,
    max_iters: usize,
) -> Result<(Iterate, Gradients, f64)> {
    let config = SolverConfig::newton();
    let mut it = ctx.evaluate(u0, true)?;
    let mut grads = ctx.gradients(&it);
    let residual = |g: &Gradients| g.combine(t).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for iter in 0..max_iters {
        if residual(&grads) <= grad_tol {
            break;
        }
        let grad = grads.combine(t);
        let du = newton_direction(ctx, &it, &grad, t, iter)?;
        match line_search(ctx, &it, &grad, &du, t, &config)? {
            Some(step) => it = step.iterate,
            None => break,
        }
        grads = ctx.gradients(&it);
    }
    let r = residual(&grads);
    Ok((it, grads, r))
}
