//! Shrinkage solvers for `½‖b − Ax‖² + λ‖x‖₁`: iterative soft thresholding
//! with Barzilai-Borwein steps and continuation, and FISTA with backtracking.

use serde::{Deserialize, Serialize};

use crate::error::{L1Error, Result};
use crate::model::{kkt_from_correlation, Monitor, Problem, SolverConfig, SolverResult};
use crate::numerics::{dot, lipschitz_constant, norm1, norm2, norm_inf, shrink, Dictionary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IstParams {
    /// First continuation stage as a fraction of `‖Aᵀb‖∞`.
    pub lambda_start_scale: f64,
    pub beta: f64,
    pub min_stages: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Step doublings tried before an inner step is abandoned.
    pub max_backtracks: usize,
}

impl Default for IstParams {
    fn default() -> Self {
        Self {
            lambda_start_scale: 0.9,
            beta: 0.5,
            min_stages: 5,
            alpha_min: 1e-30,
            alpha_max: 1e30,
            max_backtracks: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FistaParams {
    pub beta: f64,
    pub l0: f64,
    pub eta: f64,
    /// Use `1.01·‖A‖²` from power iteration instead of backtracking.
    pub exact_lipschitz: bool,
    /// Decrease λ geometrically from `0.9‖Aᵀb‖∞` instead of starting at the target.
    pub continuation: bool,
    /// Iterations between optimality checks.
    pub check_every: usize,
}

impl Default for FistaParams {
    fn default() -> Self {
        Self { beta: 0.5, l0: 1.0, eta: 1.5, exact_lipschitz: false, continuation: true, check_every: 1 }
    }
}

/// Geometric sequence of multipliers ending at the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    pub lambda_start: f64,
    pub beta: f64,
    pub lambda_target: f64,
}

impl ContinuationSchedule {
    pub fn new(lambda_start: f64, beta: f64, lambda_target: f64) -> Result<Self> {
        if !(lambda_target > 0.0) || !lambda_target.is_finite() {
            return Err(L1Error::InvalidArgument(format!("target lambda must be positive, got {lambda_target}")));
        }
        if !(lambda_start >= lambda_target) || !lambda_start.is_finite() {
            return Err(L1Error::InvalidArgument(format!("start lambda {lambda_start} below target {lambda_target}")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(L1Error::InvalidArgument(format!("decrease factor must lie in (0,1), got {beta}")));
        }
        Ok(Self { lambda_start, beta, lambda_target })
    }

    /// The default schedule for a problem: start at `scale·‖Aᵀb‖∞`.
    pub fn for_problem<D: Dictionary + ?Sized>(
        problem: &Problem<'_, D>,
        lambda_target: f64,
        params: &IstParams,
    ) -> Result<Self> {
        let start = (params.lambda_start_scale * problem.lambda_max()).max(lambda_target);
        Self::new(start, params.beta, lambda_target)
    }

    /// Stage values; at least `min_stages` precede the target whenever the
    /// start lies above it (the ratio is shrunk if β alone would give fewer).
    pub fn stages(&self, min_stages: usize) -> Vec<f64> {
        if self.lambda_start <= self.lambda_target {
            return vec![self.lambda_target];
        }
        let ratio = self.lambda_target / self.lambda_start;
        let natural = (ratio.ln() / self.beta.ln()).ceil() as usize;
        let mut out = Vec::new();
        if natural >= min_stages.max(1) {
            let mut l = self.lambda_start;
            while l > self.lambda_target {
                out.push(l);
                l *= self.beta;
            }
        } else {
            let m = min_stages.max(1);
            let step = ratio.powf(1.0 / m as f64);
            let mut l = self.lambda_start;
            for _ in 0..m {
                out.push(l);
                l *= step;
            }
        }
        out.push(self.lambda_target);
        out
    }
}

/// Barzilai-Borwein curvature `sᵀg / sᵀs`, clamped to `[alpha_min, alpha_max]`.
pub fn bb_alpha(s: &[f64], g: &[f64], alpha_min: f64, alpha_max: f64) -> f64 {
    let ss = dot(s, s);
    let a = dot(s, g) / ss;
    if a.is_nan() {
        return alpha_max;
    }
    a.clamp(alpha_min, alpha_max)
}

/// `(1 + √(4t² + 1)) / 2`
pub fn fista_t_next(t: f64) -> f64 {
    (1.0 + (4.0 * t * t + 1.0).sqrt()) / 2.0
}

fn gradient<D: Dictionary + ?Sized>(a: &D, ax: &[f64], b: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = ax.iter().zip(b).map(|(u, v)| u - v).collect();
    a.adjoint(&r)
}

fn half_sq_dist(ax: &[f64], b: &[f64]) -> f64 {
    0.5 * ax.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>()
}

fn soft_step(y: &[f64], grad: &[f64], inv_step: f64, thresh: f64) -> Vec<f64> {
    soft_step_partial(y, grad, inv_step, thresh, 0)
}

fn soft_step_partial(y: &[f64], grad: &[f64], inv_step: f64, thresh: f64, free: usize) -> Vec<f64> {
    y.iter()
        .zip(grad)
        .enumerate()
        .map(|(i, (yi, gi))| if i < free { yi - inv_step * gi } else { shrink(yi - inv_step * gi, thresh) })
        .collect()
}

/// KKT violation from the gradient `Aᵀ(Ax − b)`; free coordinates must
/// have a zero gradient.
fn kkt_partial(x: &[f64], grad: &[f64], lambda: f64, free: usize) -> f64 {
    let free_part = grad[..free].iter().fold(0.0, |m, g| f64::max(m, g.abs()));
    let c: Vec<f64> = grad[free..].iter().map(|g| -g).collect();
    free_part.max(kkt_from_correlation(&x[free..], &c, lambda))
}

/// Accepted proximal step of the backtracking search.
#[derive(Debug, Clone)]
pub struct BacktrackStep {
    pub lipschitz: f64,
    pub x_next: Vec<f64>,
    pub ax_next: Vec<f64>,
    /// Doublings (powers of η) applied to the incoming estimate.
    pub increases: usize,
}

const MAX_BACKTRACKS: usize = 100;

/// Smallest `L = η^j·L_prev` with `F(G_L(y)) ≤ Q_L(G_L(y), y)`.
pub fn backtrack_l<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    y: &[f64],
    l_prev: f64,
    eta: f64,
    lambda: f64,
) -> Result<BacktrackStep> {
    let ay = problem.a.apply(y);
    let grad = gradient(problem.a, &ay, problem.b);
    backtrack_from(problem, y, &ay, &grad, l_prev, eta, lambda)
}

fn backtrack_from<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    y: &[f64],
    ay: &[f64],
    grad: &[f64],
    l_prev: f64,
    eta: f64,
    lambda: f64,
) -> Result<BacktrackStep> {
    if !(l_prev > 0.0) || !(eta > 1.0) {
        return Err(L1Error::InvalidArgument(format!(
            "backtracking needs L > 0 and eta > 1 (L = {l_prev}, eta = {eta})"
        )));
    }
    let fy = half_sq_dist(ay, problem.b);
    let mut l = l_prev;
    for j in 0..=MAX_BACKTRACKS {
        let x = soft_step(y, grad, 1.0 / l, lambda / l);
        let ax = problem.a.apply(&x);
        let diff: Vec<f64> = x.iter().zip(y).map(|(u, v)| u - v).collect();
        // compare the smooth parts; the λ‖x‖₁ terms cancel
        let f = half_sq_dist(&ax, problem.b);
        let q = fy + dot(&diff, grad) + 0.5 * l * dot(&diff, &diff);
        if !f.is_finite() || !q.is_finite() {
            return Err(L1Error::NumericalBreakdown("non-finite value in backtracking".into()));
        }
        if f <= q + 1e-12 * q.abs().max(f64::MIN_POSITIVE) {
            return Ok(BacktrackStep { lipschitz: l, x_next: x, ax_next: ax, increases: j });
        }
        l *= eta;
    }
    Err(L1Error::NumericalBreakdown(format!("backtracking exceeded {MAX_BACKTRACKS} increases")))
}

/// IST with BB steps, monotone acceptance and continuation down to the
/// schedule's target.
pub fn ist_solve<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    schedule: &ContinuationSchedule,
    config: &SolverConfig,
) -> Result<SolverResult> {
    ist_solve_partial(problem, schedule, config, 0)
}

/// IST where the first `free` coordinates take plain gradient steps and
/// only the rest are soft-thresholded.
pub fn ist_solve_partial<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    schedule: &ContinuationSchedule,
    config: &SolverConfig,
    free: usize,
) -> Result<SolverResult> {
    let params = &config.ist;
    if free > problem.n() {
        return Err(L1Error::InvalidArgument(format!("{free} free coordinates exceed width {}", problem.n())));
    }
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let (a, b) = (problem.a, problem.b);
    let n = a.ncols();
    let target = schedule.lambda_target;

    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; a.nrows()];
    let mut grad = gradient(a, &ax, b);
    monitor.initial(&x, half_sq_dist(&ax, b) + target * norm1(&x[free..]), norm2(b));
    if kkt_partial(&x, &grad, target, free) == 0.0 {
        return Ok(monitor.finish(x, 0, true));
    }

    // first curvature: Cauchy step along the gradient
    let ag = a.apply(&grad);
    let mut alpha = if dot(&grad, &grad) > 0.0 {
        (dot(&ag, &ag) / dot(&grad, &grad)).clamp(params.alpha_min, params.alpha_max)
    } else {
        1.0
    };

    let stages = schedule.stages(params.min_stages);
    let last_stage = stages.len() - 1;
    let mut k = 0usize;
    let mut converged = false;

    'stages: for (si, &lambda) in stages.iter().enumerate() {
        let final_stage = si == last_stage;
        let stage_tol = if final_stage { config.tol } else { config.tol.max(1e-2) };
        let mut fx = half_sq_dist(&ax, b) + lambda * norm1(&x[free..]);
        loop {
            let kkt = kkt_partial(&x, &grad, lambda, free) / lambda;
            if kkt <= stage_tol {
                if final_stage {
                    converged = true;
                }
                break;
            }
            if k >= config.max_iter {
                break 'stages;
            }
            // monotone step: increase α until F strictly decreases
            let mut accepted = None;
            let mut trial_alpha = alpha;
            for _ in 0..=params.max_backtracks {
                let cand = soft_step_partial(&x, &grad, 1.0 / trial_alpha, lambda / trial_alpha, free);
                let a_cand = a.apply(&cand);
                let f_cand = half_sq_dist(&a_cand, b) + lambda * norm1(&cand[free..]);
                if f_cand < fx {
                    accepted = Some((cand, a_cand, f_cand));
                    break;
                }
                trial_alpha = (2.0 * trial_alpha).min(params.alpha_max);
            }
            let Some((x_new, ax_new, f_new)) = accepted else {
                // no strict decrease is possible at this precision
                if final_stage {
                    converged = kkt <= 10.0 * stage_tol.max(1e-10);
                }
                if final_stage {
                    break 'stages;
                }
                break;
            };
            k += 1;
            let grad_new = gradient(a, &ax_new, b);
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(u, v)| u - v).collect();
            let yv: Vec<f64> = grad_new.iter().zip(&grad).map(|(u, v)| u - v).collect();
            alpha = bb_alpha(&s, &yv, params.alpha_min, params.alpha_max);
            x = x_new;
            ax = ax_new;
            grad = grad_new;
            fx = f_new;

            let res = norm2(&ax.iter().zip(b).map(|(u, v)| v - u).collect::<Vec<_>>());
            let kkt_now = if final_stage { Some(kkt_partial(&x, &grad, lambda, free) / lambda) } else { None };
            if monitor.step(k, &x, fx, res, kkt_now)? && final_stage {
                converged = true;
                break 'stages;
            }
        }
    }
    Ok(monitor.finish(x, k, converged))
}

/// IST with the default continuation schedule for `config.lambda`.
pub fn ist_solve_default<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    config: &SolverConfig,
) -> Result<SolverResult> {
    let lambda = problem.resolve_lambda(config);
    if lambda == 0.0 {
        return Err(L1Error::InvalidArgument("shrinkage solvers need lambda > 0".into()));
    }
    let schedule = ContinuationSchedule::for_problem(problem, lambda, &config.ist)?;
    ist_solve(problem, &schedule, config)
}

/// Per-iteration record of a FISTA run, used by the convergence-bound checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FistaStep {
    pub objective: f64,
    pub lipschitz: f64,
    pub t: f64,
}

/// FISTA at `λ̄ = config.lambda` (default: `1e-2·‖Aᵀb‖∞`).
pub fn fista_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    fista_run(problem, config, None, |_| {})
}

/// FISTA from a given start, reporting every accepted step.
pub fn fista_run<D, F>(
    problem: &Problem<'_, D>,
    config: &SolverConfig,
    x_start: Option<&[f64]>,
    mut observer: F,
) -> Result<SolverResult>
where
    D: Dictionary + ?Sized,
    F: FnMut(&FistaStep),
{
    let params = &config.fista;
    if !(params.beta > 0.0 && params.beta < 1.0) || !(params.eta > 1.0) || !(params.l0 > 0.0) {
        return Err(L1Error::InvalidArgument("fista needs 0 < beta < 1, eta > 1, L0 > 0".into()));
    }
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let (a, b) = (problem.a, problem.b);
    let n = a.ncols();
    let lambda_bar = problem.resolve_lambda(config);
    if !(lambda_bar > 0.0) {
        return Err(L1Error::InvalidArgument("shrinkage solvers need lambda > 0".into()));
    }
    let exact_l = if params.exact_lipschitz { Some(lipschitz_constant(a)?) } else { None };

    let mut x = match x_start {
        Some(x0) => {
            crate::error::check_len("start length", n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };
    let mut ax = a.apply(&x);
    let mut x_prev = x.clone();
    let mut ax_prev = ax.clone();
    let (mut t_prev, mut t) = (1.0f64, 1.0f64);
    let mut l = exact_l.unwrap_or(params.l0);
    let mut lambda = if params.continuation { (0.9 * problem.lambda_max()).max(lambda_bar) } else { lambda_bar };

    let res0: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    monitor.initial(&x, 0.5 * dot(&res0, &res0) + lambda_bar * norm1(&x), norm2(&res0));
    let grad0 = a.adjoint(&res0.iter().map(|v| -v).collect::<Vec<_>>());
    if x.iter().all(|v| *v == 0.0) && norm_inf(&grad0) <= lambda_bar {
        return Ok(monitor.finish(x, 0, true));
    }

    let check_every = params.check_every.max(1);
    let mut converged = false;
    let mut k = 0;
    while k < config.max_iter {
        let w = (t_prev - 1.0) / t;
        let y: Vec<f64> = x.iter().zip(&x_prev).map(|(xc, xp)| xc + w * (xc - xp)).collect();
        let ay: Vec<f64> = ax.iter().zip(&ax_prev).map(|(c, p)| c + w * (c - p)).collect();
        let grad = gradient(a, &ay, b);
        let step = match exact_l {
            Some(le) => {
                let xn = soft_step(&y, &grad, 1.0 / le, lambda / le);
                let axn = a.apply(&xn);
                BacktrackStep { lipschitz: le, x_next: xn, ax_next: axn, increases: 0 }
            }
            None => backtrack_from(problem, &y, &ay, &grad, l, params.eta, lambda)?,
        };
        l = step.lipschitz;
        x_prev = std::mem::replace(&mut x, step.x_next);
        ax_prev = std::mem::replace(&mut ax, step.ax_next);
        t_prev = t;
        t = fista_t_next(t);
        k += 1;

        let res: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
        let obj = 0.5 * dot(&res, &res) + lambda_bar * norm1(&x);
        observer(&FistaStep { objective: obj, lipschitz: l, t });

        let at_target = lambda <= lambda_bar;
        let kkt = if at_target && (k % check_every == 0 || monitor.wants_kkt()) {
            let c = a.adjoint(&res);
            Some(kkt_from_correlation(&x, &c, lambda_bar) / lambda_bar)
        } else {
            None
        };
        let fired = monitor.step(k, &x, obj, norm2(&res), kkt)?;
        if at_target && (fired || kkt.is_some_and(|v| v <= config.tol)) {
            converged = true;
            break;
        }
        lambda = (params.beta * lambda).max(lambda_bar);
    }
    Ok(monitor.finish(x, k, converged))
}
