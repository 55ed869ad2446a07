//! Augmented Lagrangian solvers for `min ‖x‖₁ s.t. Ax = b`: the primal
//! method with an inner FISTA loop, and the dual method alternating an ℓ∞
//! projection, a least-squares multiplier solve and a primal update.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, L1Error, Result};
use crate::model::{kkt_from_correlation, Monitor, Problem, SolverConfig, SolverResult};
use crate::numerics::{
    dot, lipschitz_constant, norm1, norm2, norm_inf, project_box_linf, shrink, CholFactor, Dictionary,
};
use crate::shrinkage::fista_t_next;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PalmParams {
    pub mu0: f64,
    pub rho: f64,
    pub inner_max_iter: usize,
    /// Inner loop stops when the step is below `inner_tol_scale / μ_k`.
    pub inner_tol_scale: f64,
    /// Stop as soon as `‖b − Ax‖₂` falls to this level (noisy data).
    pub residual_target: Option<f64>,
    /// Cap on the penalty; past it only the inner tolerance keeps tightening.
    pub mu_max: f64,
}

impl Default for PalmParams {
    fn default() -> Self {
        Self { mu0: 1.0, rho: 2.0, inner_max_iter: 200, inner_tol_scale: 1e-2, residual_target: None, mu_max: 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DalmParams {
    pub beta: f64,
    /// Replace the exact multiplier solve by one conjugate-gradient step.
    pub cg_step: bool,
    /// Stop as soon as `‖b − Ax‖₂` falls to this level (noisy data).
    pub residual_target: Option<f64>,
    /// With `Some(μ)`, relax `Ax = b` to the penalty `‖b − Ax‖²/(2μ)`; the
    /// minimizer matches the λ-form objective at `λ = μ`.
    pub penalty: Option<f64>,
}

impl Default for DalmParams {
    fn default() -> Self {
        Self { beta: 1.0, cg_step: false, residual_target: None, penalty: None }
    }
}

/// Primal augmented Lagrangian. The first `free` coordinates are left out
/// of the ℓ1 term (used for the `[B, I]` alignment system).
pub fn palm_solve_partial<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    config: &SolverConfig,
    free: usize,
) -> Result<SolverResult> {
    let params = &config.palm;
    if !(params.mu0 > 0.0) || !(params.rho > 1.0) || params.inner_max_iter == 0 || !(params.mu_max >= params.mu0) {
        return Err(L1Error::InvalidArgument("palm needs 0 < mu0 <= mu_max, rho > 1 and a positive inner cap".into()));
    }
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let (a, b) = (problem.a, problem.b);
    let n = a.ncols();
    if free > n {
        return Err(L1Error::InvalidArgument(format!("{free} free coordinates exceed width {n}")));
    }
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; a.nrows()];
    monitor.initial(&x, 0.0, bnorm);
    if bnorm == 0.0 {
        return Ok(monitor.finish(x, 0, true));
    }
    let tau = lipschitz_constant(a)?;
    let penalized = |x: &[f64]| norm1(&x[free..]);

    let mut y = vec![0.0; a.nrows()];
    let mut mu = params.mu0;
    let mut precision = params.mu0;
    let mut total = 0usize;
    let mut outer = 0usize;
    let mut converged = false;

    while total < config.max_iter {
        // inner: min (1/μ)‖x‖₁ + ½‖b + y/μ − Ax‖² by FISTA with L = τ
        let target: Vec<f64> = b.iter().zip(&y).map(|(bi, yi)| bi + yi / mu).collect();
        let thresh = 1.0 / (mu * tau);
        let inner_tol = params.inner_tol_scale / precision;
        let x_outer = x.clone();
        let (mut x_prev, mut ax_prev) = (x.clone(), ax.clone());
        let (mut t_prev, mut t) = (1.0f64, 1.0f64);
        for _ in 0..params.inner_max_iter {
            if total >= config.max_iter {
                break;
            }
            let w = (t_prev - 1.0) / t;
            let yv: Vec<f64> = x.iter().zip(&x_prev).map(|(c, p)| c + w * (c - p)).collect();
            let ay: Vec<f64> = ax.iter().zip(&ax_prev).map(|(c, p)| c + w * (c - p)).collect();
            let r: Vec<f64> = ay.iter().zip(&target).map(|(u, v)| u - v).collect();
            let grad = a.adjoint(&r);
            let xn: Vec<f64> = (0..n)
                .map(|i| {
                    let u = yv[i] - grad[i] / tau;
                    if i < free {
                        u
                    } else {
                        shrink(u, thresh)
                    }
                })
                .collect();
            let axn = a.apply(&xn);
            let step: f64 = xn.iter().zip(&x).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            x_prev = std::mem::replace(&mut x, xn);
            ax_prev = std::mem::replace(&mut ax, axn);
            t_prev = t;
            t = fista_t_next(t);
            total += 1;
            if step <= inner_tol {
                break;
            }
        }

        let res: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
        for (yi, ri) in y.iter_mut().zip(&res) {
            *yi += mu * ri;
        }
        mu = (mu * params.rho).min(params.mu_max);
        precision *= params.rho;
        outer += 1;

        let res_norm = norm2(&res);
        let change = norm2(&x.iter().zip(&x_outer).map(|(u, v)| u - v).collect::<Vec<_>>());
        // y certifies x when Aᵀy ∈ ∂‖x‖₁ on the penalized part and vanishes on the free part
        let aty = a.adjoint(&y);
        let cert = norm_inf(&aty[..free]).max(kkt_from_correlation(&x[free..], &aty[free..], 1.0));
        let fired = monitor.step(total, &x, penalized(&x), res_norm, None)?;
        let reached = params.residual_target.is_some_and(|t| res_norm <= t);
        let settled = res_norm <= config.tol * bnorm
            && change <= config.tol * norm2(&x).max(f64::MIN_POSITIVE)
            && cert <= config.tol.sqrt();
        if fired || reached || settled {
            converged = true;
            break;
        }
        if outer > 200 {
            break;
        }
    }
    Ok(monitor.finish(x, total, converged))
}

pub fn palm_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    palm_solve_partial(problem, config, 0)
}

/// Multiplier step of the dual method: solves `βAAᵀy = βAz − (Ax − b)`
/// with a cached factor of `AAᵀ`.
pub fn dual_y_solve<D: Dictionary + ?Sized>(
    gram_chol: &CholFactor,
    a: &D,
    z_next: &[f64],
    x: &[f64],
    b: &[f64],
    beta: f64,
) -> Result<Vec<f64>> {
    let rhs = dual_rhs(a, z_next, x, b, beta)?;
    gram_chol.solve(&rhs.iter().map(|v| v / beta).collect::<Vec<_>>())
}

fn dual_rhs<D: Dictionary + ?Sized>(a: &D, z: &[f64], x: &[f64], b: &[f64], beta: f64) -> Result<Vec<f64>> {
    check_len("z length (columns of A)", a.ncols(), z.len())?;
    check_len("x length (columns of A)", a.ncols(), x.len())?;
    check_len("b length (rows of A)", a.nrows(), b.len())?;
    if !(beta > 0.0) {
        return Err(L1Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let az = a.apply(z);
    let ax = a.apply(x);
    Ok((0..a.nrows()).map(|i| beta * az[i] - (ax[i] - b[i])).collect())
}

/// Factor of `AAᵀ`; fails with an ill-conditioned error when `A` has
/// dependent rows.
pub fn gram_factor<D: Dictionary + ?Sized>(a: &D) -> Result<CholFactor> {
    let g = a.weighted_gram(&vec![1.0; a.ncols()]);
    CholFactor::factor(&g).map_err(|e| L1Error::IllConditioned(format!("AAᵀ is singular: {e}")))
}

/// Dual augmented Lagrangian.
pub fn dalm_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    let params = &config.dalm;
    let beta = params.beta;
    if !(beta > 0.0) {
        return Err(L1Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let mu = params.penalty.unwrap_or(0.0);
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(L1Error::InvalidArgument(format!("penalty must be non-negative, got {mu}")));
    }
    if mu > 0.0 && params.cg_step {
        return Err(L1Error::InvalidArgument("the cg step is only available without a penalty".into()));
    }
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let (a, b) = (problem.a, problem.b);
    let n = a.ncols();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    monitor.initial(&x, 0.0, bnorm);
    if bnorm == 0.0 {
        return Ok(monitor.finish(x, 0, true));
    }
    let chol = if mu > 0.0 {
        let mut g = a.weighted_gram(&vec![1.0; n]);
        for i in 0..a.nrows() {
            g.set(i, i, g.get(i, i) + mu / beta);
        }
        CholFactor::factor(&g).map_err(|e| L1Error::IllConditioned(format!("AAᵀ + (μ/β)I is singular: {e}")))?
    } else {
        gram_factor(a)?
    };
    let mut y = vec![0.0; a.nrows()];
    let mut aty = vec![0.0; n];
    let mut converged = false;
    let mut k = 0;

    while k < config.max_iter {
        let u: Vec<f64> = (0..n).map(|i| aty[i] + x[i] / beta).collect();
        let z = project_box_linf(&u);
        y = if params.cg_step {
            one_cg_step(a, &y, &dual_rhs(a, &z, &x, b, beta)?, beta)
        } else {
            dual_y_solve(&chol, a, &z, &x, b, beta)?
        };
        aty = a.adjoint(&y);
        let x_prev = x.clone();
        for i in 0..n {
            x[i] -= beta * (z[i] - aty[i]);
        }
        k += 1;

        let r: Vec<f64> = b.iter().zip(a.apply(&x)).map(|(u, v)| u - v).collect();
        let res = norm2(&r);
        let primal = norm1(&x);
        let dual_res = norm2(&z.iter().zip(&aty).map(|(u, v)| u - v).collect::<Vec<_>>());
        let change = norm2(&x.iter().zip(&x_prev).map(|(u, v)| u - v).collect::<Vec<_>>());
        let (feasible, gap, value) = if mu > 0.0 {
            let value = primal + dot(&r, &r) / (2.0 * mu);
            (true, (value - (dot(b, &y) - 0.5 * mu * dot(&y, &y))).abs(), value)
        } else {
            (res <= config.tol * bnorm, (primal - dot(b, &y)).abs(), primal)
        };
        let fired = monitor.step(k, &x, primal, res, None)?;
        let scale = norm2(&x).max(f64::MIN_POSITIVE);
        if fired
            || params.residual_target.is_some_and(|t| res <= t)
            || (feasible
                && dual_res <= config.tol * norm2(&z).max(1.0)
                && gap <= config.tol * value.max(f64::MIN_POSITIVE)
                && change <= config.tol * scale)
        {
            converged = true;
            break;
        }
    }
    Ok(monitor.finish(x, k, converged))
}

/// One conjugate-gradient (steepest descent) step on `βAAᵀy = rhs` from `y`.
fn one_cg_step<D: Dictionary + ?Sized>(a: &D, y: &[f64], rhs: &[f64], beta: f64) -> Vec<f64> {
    let op = |v: &[f64]| -> Vec<f64> { a.apply(&a.adjoint(v)).into_iter().map(|w| beta * w).collect() };
    let r: Vec<f64> = rhs.iter().zip(op(y)).map(|(u, v)| u - v).collect();
    let q = op(&r);
    let curv = dot(&r, &q);
    if !(curv > 0.0) {
        return y.to_vec();
    }
    let step = dot(&r, &r) / curv;
    y.iter().zip(&r).map(|(yi, ri)| yi + step * ri).collect()
}
