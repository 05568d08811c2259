//! Semismooth Newton solvers for the discrete optimality systems.
//!
//! Three nonlinear systems are handled, all over the free-node state `y`,
//! adjoint `p` and nodal Dirac weights `u`:
//!
//! * the L2-regularized system, with `u = max(0, -B^T p - beta) / alpha`
//!   eliminated so Newton runs on `(y, p)` only;
//! * the limit system `u = max(0, u - (B^T p + beta))`, solved on the full
//!   `(y, p, u)` unknown;
//! * a continuation driver that walks `alpha` down geometrically with warm
//!   starts and finishes with the limit system.
//!
//! The Newton derivative of `max(0, v)` is taken as `1` where `v > 0` and
//! `0` where `v <= 0`. No line search is used.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::assembly::{dot, DiscreteProblem};
use crate::sparse::{self, SparseError, SparseMatrix, DEFAULT_LINEAR_TOL};

/// Default stopping tolerance on the sup-norm of the nonlinear residual.
pub const DEFAULT_NEWTON_TOL: f64 = 1e-9;
/// Relative threshold for counting a Dirac weight as part of the support.
pub const SUPPORT_THRESHOLD_REL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("regularization parameter must be positive, got alpha = {0}")]
    InvalidAlpha(f64),
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("linear solve failed in {stage} stage (alpha = {alpha:e}): {source}")]
    LinearSolve {
        stage: &'static str,
        alpha: f64,
        #[source]
        source: SparseError,
    },
    #[error("{stage} stage at alpha = {alpha:e} did not converge (residual {residual:e})")]
    StageNotConverged {
        stage: &'static str,
        alpha: f64,
        residual: f64,
    },
    #[error("state vectors do not match the problem dimensions")]
    StateShape,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub newton_tol: f64,
    pub linear_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            newton_tol: DEFAULT_NEWTON_TOL,
            linear_tol: DEFAULT_LINEAR_TOL,
            max_iter: 50,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<(), SolverError> {
        if !(self.newton_tol > 0.0) || !(self.linear_tol > 0.0) || self.max_iter == 0 {
            return Err(SolverError::InvalidParameter(format!(
                "newton_tol = {}, linear_tol = {}, max_iter = {}",
                self.newton_tol, self.linear_tol, self.max_iter
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub alpha_start: f64,
    pub alpha_factor: f64,
    pub alpha_min: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            alpha_start: 1.0,
            alpha_factor: 0.1,
            alpha_min: 1e-8,
        }
    }
}

impl ContinuationOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.alpha_start > self.alpha_min && self.alpha_min > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "need alpha_start > alpha_min > 0, got {} and {}",
                self.alpha_start, self.alpha_min
            )));
        }
        if !(self.alpha_factor > 0.0 && self.alpha_factor < 1.0) {
            return Err(SolverError::InvalidParameter(format!(
                "alpha_factor must lie in (0, 1), got {}",
                self.alpha_factor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverState {
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub u: Vec<f64>,
    /// Regularization weight; `0` for the limit system.
    pub alpha: f64,
    pub active_mask: Vec<bool>,
}

impl SolverState {
    pub fn zero(problem: &DiscreteProblem) -> Self {
        SolverState {
            y: vec![0.0; problem.n_free()],
            p: vec![0.0; problem.n_free()],
            u: vec![0.0; problem.n_control()],
            alpha: 0.0,
            active_mask: vec![false; problem.n_control()],
        }
    }

    fn check_shape(&self, problem: &DiscreteProblem) -> Result<(), SolverError> {
        if self.y.len() != problem.n_free()
            || self.p.len() != problem.n_free()
            || self.u.len() != problem.n_control()
        {
            return Err(SolverError::StateShape);
        }
        Ok(())
    }

    pub fn active_count(&self) -> usize {
        self.active_mask.iter().filter(|&&a| a).count()
    }

    /// Total mass `sum_j u_j` of the nodal Dirac measure.
    pub fn control_norm(&self) -> f64 {
        self.u.iter().sum()
    }

    pub fn support_size(&self, threshold_rel: f64) -> usize {
        let cut = support_cutoff(&self.u, threshold_rel);
        self.u.iter().filter(|&&v| v > cut).count()
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn support_cutoff(u: &[f64], threshold_rel: f64) -> f64 {
    threshold_rel * sup_norm(u).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    pub active_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSummary {
    /// `"regularized"` or `"limit"`.
    pub stage: &'static str,
    pub alpha: f64,
    pub beta: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Residual before each step and after the last one.
    pub history: Vec<IterationRecord>,
}

impl StageSummary {
    pub fn residual_history(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.residual).collect()
    }

    pub fn final_residual(&self) -> f64 {
        self.history.last().map_or(f64::INFINITY, |r| r.residual)
    }

    /// `r_last / r_previous`, when at least one step was taken.
    pub fn last_ratio(&self) -> Option<f64> {
        let n = self.history.len();
        (n >= 2).then(|| self.history[n - 1].residual / self.history[n - 2].residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub stages: Vec<StageSummary>,
    pub converged: bool,
    pub final_residual: f64,
    /// Smallest alpha reached by continuation before the limit solve.
    pub continuation_endpoint_alpha: Option<f64>,
    /// Excluded from serialized output to keep artifacts reproducible.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl SolveReport {
    fn from_stages(stages: Vec<StageSummary>, started: Instant) -> Self {
        let last = stages.last();
        SolveReport {
            converged: last.is_some_and(|s| s.converged),
            final_residual: last.map_or(f64::INFINITY, StageSummary::final_residual),
            continuation_endpoint_alpha: stages
                .iter()
                .rev()
                .find(|s| s.stage == "regularized")
                .map(|s| s.alpha),
            stages,
            wall_time_secs: started.elapsed().as_secs_f64(),
        }
    }

    pub fn final_stage(&self) -> Option<&StageSummary> {
        self.stages.last()
    }

    /// Tab-separated `stage alpha iter residual active_count` lines, one
    /// per Newton iterate.
    pub fn log_lines(&self) -> Vec<String> {
        self.stages
            .iter()
            .flat_map(|s| {
                s.history.iter().map(move |r| {
                    format!(
                        "{}\t{:e}\t{}\t{:e}\t{}",
                        s.stage, s.alpha, r.iter, r.residual, r.active_count
                    )
                })
            })
            .collect()
    }
}

/// One point on a regularization path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPoint {
    pub alpha_or_beta: f64,
    pub u: Vec<f64>,
    pub objective: f64,
    pub control_norm: f64,
    pub support_size: usize,
}

impl PathPoint {
    pub fn from_state(weight: f64, state: &SolverState, problem: &DiscreteProblem) -> Self {
        PathPoint {
            alpha_or_beta: weight,
            objective: problem.tracking(&state.y),
            control_norm: state.control_norm(),
            support_size: state.support_size(SUPPORT_THRESHOLD_REL),
            u: state.u.clone(),
        }
    }
}

fn linear_err(stage: &'static str, alpha: f64) -> impl FnOnce(SparseError) -> SolverError {
    move |source| SolverError::LinearSolve {
        stage,
        alpha,
        source,
    }
}

/// `A^T p - (M y - M y_d)`
fn adjoint_residual(state: &SolverState, problem: &DiscreteProblem) -> Vec<f64> {
    let atp = problem
        .stiffness()
        .matvec_transpose(&state.p)
        .expect("state shape checked");
    let my = problem
        .mass()
        .matvec(&state.y)
        .expect("state shape checked");
    atp.iter()
        .zip(&my)
        .zip(problem.target_load())
        .map(|((a, m), g)| a - (m - g))
        .collect()
}

fn control_from_adjoint(problem: &DiscreteProblem, p: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let btp = problem.control().matvec_transpose(p).expect("shape");
    btp.iter().map(|&v| (-v - beta).max(0.0) / alpha).collect()
}

fn regularized_residual_shifted(
    state: &SolverState,
    problem: &DiscreteProblem,
    alpha: f64,
    beta: f64,
) -> Vec<f64> {
    let mut r = adjoint_residual(state, problem);
    let u = control_from_adjoint(problem, &state.p, alpha, beta);
    let ay = problem.stiffness().matvec(&state.y).expect("shape");
    let bu = problem.control().matvec(&u).expect("shape");
    r.extend(ay.iter().zip(&bu).map(|(a, b)| a - b));
    r
}

/// Residual of the regularized system reduced to `(y, p)`:
/// `[A^T p - M(y - y_d); A y - B max(0, -B^T p) / alpha]`.
pub fn residual_regularized(
    state: &SolverState,
    problem: &DiscreteProblem,
) -> Result<Vec<f64>, SolverError> {
    if !(state.alpha > 0.0) {
        return Err(SolverError::InvalidAlpha(state.alpha));
    }
    state.check_shape(problem)?;
    Ok(regularized_residual_shifted(
        state,
        problem,
        state.alpha,
        0.0,
    ))
}

/// Residual of the limit system with measure-norm weight `beta`:
/// `[A^T p - M(y - y_d); A y - B u; u - max(0, u - B^T p - beta)]`.
pub fn residual_limit(
    state: &SolverState,
    problem: &DiscreteProblem,
    beta: f64,
) -> Result<Vec<f64>, SolverError> {
    state.check_shape(problem)?;
    let mut r = adjoint_residual(state, problem);
    let ay = problem.stiffness().matvec(&state.y).expect("shape");
    let bu = problem.control().matvec(&state.u).expect("shape");
    r.extend(ay.iter().zip(&bu).map(|(a, b)| a - b));
    let btp = problem.control().matvec_transpose(&state.p).expect("shape");
    r.extend(
        state
            .u
            .iter()
            .zip(&btp)
            .map(|(&u, &l)| u - (u - (l + beta)).max(0.0)),
    );
    Ok(r)
}

fn push_block(
    t: &mut Vec<(usize, usize, f64)>,
    m: &SparseMatrix,
    row0: usize,
    col0: usize,
    s: f64,
) {
    t.extend(m.triplets().map(|(r, c, v)| (row0 + r, col0 + c, s * v)));
}

fn push_block_transposed(
    t: &mut Vec<(usize, usize, f64)>,
    m: &SparseMatrix,
    row0: usize,
    col0: usize,
    s: f64,
) {
    t.extend(m.triplets().map(|(r, c, v)| (row0 + c, col0 + r, s * v)));
}

fn newton_step_shifted(
    state: &SolverState,
    problem: &DiscreteProblem,
    alpha: f64,
    beta: f64,
    linear_tol: f64,
) -> Result<SolverState, SolverError> {
    let n = problem.n_free();
    let a = problem.stiffness();
    let b = problem.control();
    let btp = b.matvec_transpose(&state.p).expect("shape");
    let active: Vec<bool> = btp.iter().map(|&v| -v - beta > 0.0).collect();

    let mut t = Vec::with_capacity(2 * a.nnz() + problem.mass().nnz() + 2 * b.nnz());
    push_block(&mut t, problem.mass(), 0, 0, -1.0);
    push_block_transposed(&mut t, a, 0, n, 1.0);
    push_block(&mut t, a, n, 0, 1.0);
    // d/dp of -B max(0, -B^T p - beta) / alpha is B D B^T / alpha
    for (col, _) in columns_of(b).iter().zip(&active).filter(|(_, &a)| a) {
        for &(r, v) in col {
            for &(r2, v2) in col {
                t.push((n + r, n + r2, v * v2 / alpha));
            }
        }
    }
    let jac = SparseMatrix::from_triplets(2 * n, 2 * n, &t).expect("block indices in range");
    let rhs: Vec<f64> = regularized_residual_shifted(state, problem, alpha, beta)
        .into_iter()
        .map(|v| -v)
        .collect();
    let step = sparse::solve(&jac, &rhs, linear_tol).map_err(linear_err("regularized", alpha))?;

    let y: Vec<f64> = state
        .y
        .iter()
        .zip(&step.solution[..n])
        .map(|(a, d)| a + d)
        .collect();
    let p: Vec<f64> = state
        .p
        .iter()
        .zip(&step.solution[n..])
        .map(|(a, d)| a + d)
        .collect();
    let u = control_from_adjoint(problem, &p, alpha, beta);
    let btp_new = b.matvec_transpose(&p).expect("shape");
    Ok(SolverState {
        active_mask: btp_new.iter().map(|&v| -v - beta > 0.0).collect(),
        y,
        p,
        u,
        alpha,
    })
}

/// One semismooth Newton step on the regularized `(y, p)` system.
pub fn newton_step_regularized(
    state: &SolverState,
    problem: &DiscreteProblem,
    linear_tol: f64,
) -> Result<SolverState, SolverError> {
    if !(state.alpha > 0.0) {
        return Err(SolverError::InvalidAlpha(state.alpha));
    }
    state.check_shape(problem)?;
    newton_step_shifted(state, problem, state.alpha, 0.0, linear_tol)
}

/// Block element columns of `B`: for a selection matrix each column has a
/// single entry, but general `B` is supported.
fn columns_of(b: &SparseMatrix) -> Vec<Vec<(usize, f64)>> {
    let mut cols = vec![Vec::new(); b.n_cols()];
    for (r, c, v) in b.triplets() {
        cols[c].push((r, v));
    }
    cols
}

fn newton_step_limit(
    state: &SolverState,
    problem: &DiscreteProblem,
    beta: f64,
    linear_tol: f64,
) -> Result<SolverState, SolverError> {
    let n = problem.n_free();
    let m = problem.n_control();
    let a = problem.stiffness();
    let b = problem.control();
    let btp = b.matvec_transpose(&state.p).expect("shape");
    let active: Vec<bool> = state
        .u
        .iter()
        .zip(&btp)
        .map(|(&u, &l)| u - (l + beta) > 0.0)
        .collect();

    let mut t = Vec::with_capacity(2 * a.nnz() + problem.mass().nnz() + 2 * b.nnz() + m);
    push_block(&mut t, problem.mass(), 0, 0, -1.0);
    push_block_transposed(&mut t, a, 0, n, 1.0);
    push_block(&mut t, a, n, 0, 1.0);
    push_block(&mut t, b, n, 2 * n, -1.0);
    let cols = columns_of(b);
    for j in 0..m {
        if active[j] {
            for &(r, v) in &cols[j] {
                t.push((2 * n + j, n + r, v));
            }
        } else {
            t.push((2 * n + j, 2 * n + j, 1.0));
        }
    }
    let jac =
        SparseMatrix::from_triplets(2 * n + m, 2 * n + m, &t).expect("block indices in range");
    let rhs: Vec<f64> = residual_limit(state, problem, beta)?
        .into_iter()
        .map(|v| -v)
        .collect();
    let step = sparse::solve(&jac, &rhs, linear_tol).map_err(linear_err("limit", 0.0))?;

    let s = &step.solution;
    let y: Vec<f64> = state.y.iter().zip(&s[..n]).map(|(a, d)| a + d).collect();
    let p: Vec<f64> = state
        .p
        .iter()
        .zip(&s[n..2 * n])
        .map(|(a, d)| a + d)
        .collect();
    let mut u: Vec<f64> = state
        .u
        .iter()
        .zip(&s[2 * n..])
        .map(|(a, d)| a + d)
        .collect();
    // inactive rows fix u_j = 0; write it exactly
    for (uj, &act) in u.iter_mut().zip(&active) {
        if !act {
            *uj = 0.0;
        }
    }
    let btp_new = b.matvec_transpose(&p).expect("shape");
    Ok(SolverState {
        active_mask: u
            .iter()
            .zip(&btp_new)
            .map(|(&u, &l)| u - (l + beta) > 0.0)
            .collect(),
        y,
        p,
        u,
        alpha: 0.0,
    })
}

/// Runs Newton steps until the sup-norm residual drops below `tol`; at least
/// one step is always taken so the report carries a contraction ratio.
fn newton_loop(
    stage: &'static str,
    alpha: f64,
    beta: f64,
    mut state: SolverState,
    opts: &SolverOptions,
    residual: impl Fn(&SolverState) -> Result<Vec<f64>, SolverError>,
    step: impl Fn(&SolverState) -> Result<SolverState, SolverError>,
) -> Result<(SolverState, StageSummary), SolverError> {
    let mut history = Vec::new();
    let mut best: Option<(f64, SolverState)> = None;
    let mut converged = false;
    let mut iterations = 0;
    loop {
        let rn = sup_norm(&residual(&state)?);
        history.push(IterationRecord {
            iter: iterations,
            residual: rn,
            active_count: state.active_count(),
        });
        log::debug!(
            "{stage}\t{alpha:e}\t{iterations}\t{rn:e}\t{}",
            state.active_count()
        );
        if best.as_ref().is_none_or(|(r, _)| rn < *r) {
            best = Some((rn, state.clone()));
        }
        if rn.is_finite() && rn <= opts.newton_tol && iterations >= 1 {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        state = step(&state)?;
        iterations += 1;
    }
    if !converged {
        state = best.expect("at least one iterate").1;
    }
    Ok((
        state,
        StageSummary {
            stage,
            alpha,
            beta,
            iterations,
            converged,
            history,
        },
    ))
}

fn regularized_stage(
    problem: &DiscreteProblem,
    alpha: f64,
    beta: f64,
    start: SolverState,
    opts: &SolverOptions,
) -> Result<(SolverState, StageSummary), SolverError> {
    let mut start = start;
    start.alpha = alpha;
    start.u = control_from_adjoint(problem, &start.p, alpha, beta);
    let btp = problem.control().matvec_transpose(&start.p).expect("shape");
    start.active_mask = btp.iter().map(|&v| -v - beta > 0.0).collect();
    newton_loop(
        "regularized",
        alpha,
        beta,
        start,
        opts,
        |s| Ok(regularized_residual_shifted(s, problem, alpha, beta)),
        |s| newton_step_shifted(s, problem, alpha, beta, opts.linear_tol),
    )
}

/// Solves the L2-regularized system for one `alpha`.
pub fn solve_regularized(
    problem: &DiscreteProblem,
    alpha: f64,
    warm_start: Option<&SolverState>,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport), SolverError> {
    if !(alpha > 0.0) {
        return Err(SolverError::InvalidAlpha(alpha));
    }
    opts.validate()?;
    let started = Instant::now();
    let start = match warm_start {
        Some(s) => {
            s.check_shape(problem)?;
            s.clone()
        }
        None => SolverState::zero(problem),
    };
    let (state, summary) = regularized_stage(problem, alpha, 0.0, start, opts)?;
    Ok((state, SolveReport::from_stages(vec![summary], started)))
}

fn limit_stage(
    problem: &DiscreteProblem,
    beta: f64,
    start: SolverState,
    opts: &SolverOptions,
) -> Result<(SolverState, StageSummary), SolverError> {
    let mut start = start;
    start.alpha = 0.0;
    let btp = problem.control().matvec_transpose(&start.p).expect("shape");
    start.active_mask = start
        .u
        .iter()
        .zip(&btp)
        .map(|(&u, &l)| u - (l + beta) > 0.0)
        .collect();
    newton_loop(
        "limit",
        0.0,
        beta,
        start,
        opts,
        |s| residual_limit(s, problem, beta),
        |s| newton_step_limit(s, problem, beta, opts.linear_tol),
    )
}

/// Solves the unregularized system from a warm start.
///
/// Non-convergence is not an error: the best iterate is returned and the
/// report's `converged` flag is false.
pub fn solve_limit(
    problem: &DiscreteProblem,
    warm_start: &SolverState,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport), SolverError> {
    solve_limit_with_beta(problem, 0.0, warm_start, opts)
}

fn solve_limit_with_beta(
    problem: &DiscreteProblem,
    beta: f64,
    warm_start: &SolverState,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport), SolverError> {
    opts.validate()?;
    warm_start.check_shape(problem)?;
    let started = Instant::now();
    let (state, summary) = limit_stage(problem, beta, warm_start.clone(), opts)?;
    Ok((state, SolveReport::from_stages(vec![summary], started)))
}

/// Continuation in `alpha` followed by the limit solve, all with a shifted
/// threshold `beta` (zero for the plain problem).
fn continuation_shifted(
    problem: &DiscreteProblem,
    beta: f64,
    cont: &ContinuationOptions,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport, Vec<PathPoint>), SolverError> {
    cont.validate()?;
    opts.validate()?;
    let started = Instant::now();
    let mut stages = Vec::new();
    let mut path = Vec::new();
    let mut state = SolverState::zero(problem);
    let mut prev_alpha: Option<f64> = None;
    let mut alpha = cont.alpha_start;
    let endpoint = cont.alpha_min * (1.0 + 1e-9);

    loop {
        let attempt = regularized_stage(problem, alpha, beta, state.clone(), opts);
        let (next, summary) = match (attempt, prev_alpha) {
            (Ok((s, summary)), _) if summary.converged => (s, summary),
            (result, Some(prev)) => {
                // retry once with half the reduction
                let failed_residual = match &result {
                    Ok((_, s)) => s.final_residual(),
                    Err(_) => f64::INFINITY,
                };
                let retry_alpha = prev * 0.5 * (1.0 + cont.alpha_factor);
                log::warn!(
                    "regularized stage at alpha = {alpha:e} failed (residual {failed_residual:e}); retrying at {retry_alpha:e}"
                );
                if let Ok((_, s)) = result {
                    stages.push(s);
                }
                alpha = retry_alpha;
                let (s, summary) = regularized_stage(problem, alpha, beta, state.clone(), opts)?;
                if !summary.converged {
                    return Err(SolverError::StageNotConverged {
                        stage: "regularized",
                        alpha,
                        residual: summary.final_residual(),
                    });
                }
                (s, summary)
            }
            (Ok((_, summary)), None) => {
                return Err(SolverError::StageNotConverged {
                    stage: "regularized",
                    alpha,
                    residual: summary.final_residual(),
                })
            }
            (Err(e), None) => return Err(e),
        };
        state = next;
        stages.push(summary);
        path.push(PathPoint::from_state(alpha, &state, problem));
        if alpha <= endpoint {
            break;
        }
        prev_alpha = Some(alpha);
        alpha = (alpha * cont.alpha_factor).max(cont.alpha_min);
    }

    let (state, summary) = limit_stage(problem, beta, state, opts)?;
    stages.push(summary);
    Ok((state, SolveReport::from_stages(stages, started), path))
}

/// Walks `alpha` from `alpha_start` down to `alpha_min` by `alpha_factor`,
/// warm-starting every stage, then solves the limit system.
///
/// Returns the limit solution, the combined report, and one [`PathPoint`]
/// per regularized stage.
pub fn continuation_path(
    problem: &DiscreteProblem,
    cont: &ContinuationOptions,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport, Vec<PathPoint>), SolverError> {
    continuation_shifted(problem, 0.0, cont, opts)
}

/// [`continuation_path`] for the problem with measure-norm cost `beta`.
pub fn continuation_path_with_beta(
    problem: &DiscreteProblem,
    beta: f64,
    cont: &ContinuationOptions,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport, Vec<PathPoint>), SolverError> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(SolverError::InvalidParameter(format!(
            "beta must be nonnegative, got {beta}"
        )));
    }
    continuation_shifted(problem, beta, cont, opts)
}

/// Solves the limit system with an additional measure-norm cost
/// `beta * sum_j u_j`, i.e. the complementarity
/// `u = max(0, u - (B^T p + beta))`.
///
/// With a warm start, Newton runs directly on the limit system and falls
/// back to a fresh continuation if that fails. Without one, continuation
/// (with the same `beta` shift) supplies the start.
pub fn solve_beta(
    problem: &DiscreteProblem,
    beta: f64,
    warm_start: Option<&SolverState>,
    cont: &ContinuationOptions,
    opts: &SolverOptions,
) -> Result<(SolverState, SolveReport), SolverError> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(SolverError::InvalidParameter(format!(
            "beta must be nonnegative, got {beta}"
        )));
    }
    if let Some(warm) = warm_start {
        let (state, report) = solve_limit_with_beta(problem, beta, warm, opts)?;
        if report.converged {
            return Ok((state, report));
        }
        log::warn!("warm-started beta = {beta:e} solve failed; falling back to continuation");
    }
    let (state, report, _) = continuation_shifted(problem, beta, cont, opts)?;
    Ok((state, report))
}

/// `sum_j u_j (B^T p)_j`
pub fn complementarity_pairing(state: &SolverState, problem: &DiscreteProblem) -> f64 {
    let btp = problem.control().matvec_transpose(&state.p).expect("shape");
    dot(&state.u, &btp)
}
