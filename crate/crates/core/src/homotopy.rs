//! Exact solution path of `½‖b − Ax‖² + λ‖x‖₁` as λ decreases.
//!
//! Starting at `λ₀ = ‖Aᵀb‖∞` with a single active column, each step moves
//! along the equiangular direction `d_I = (A_IᵀA_I)⁻¹ sgn(c_I)` until a new
//! column attains the maximal correlation or an active coefficient crosses
//! zero. The Gram factor is maintained by column append/delete.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, L1Error, Result};
use crate::model::{kkt_from_correlation, Monitor, Problem, SolverConfig, SolverResult};
use crate::numerics::{dot, norm1, norm2, CholFactor, DenseMatrix, Dictionary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HomotopyParams {
    /// Step lengths within this (relative) margin count as a tie; removal wins.
    pub tie_tol: f64,
    /// A direction whose Gram residual exceeds this triggers refactorization.
    pub refactor_tol: f64,
}

impl Default for HomotopyParams {
    fn default() -> Self {
        Self { tie_tol: 1e-12, refactor_tol: 1e-6 }
    }
}

/// Iterate of the path: the current minimizer at `lambda`.
#[derive(Debug, Clone)]
pub struct PathState {
    pub x: Vec<f64>,
    /// Active columns in insertion order (matches the factor's ordering).
    pub support: Vec<usize>,
    pub lambda: f64,
    /// `Aᵀ(b − Ax)`
    pub c: Vec<f64>,
    /// Factor of `A_IᵀA_I`.
    pub chol: CholFactor,
}

/// Candidate step lengths to the next breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoints {
    pub gamma_plus: f64,
    pub i_plus: Option<usize>,
    pub gamma_minus: f64,
    pub i_minus: Option<usize>,
}

/// One row of the path dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub lambda: f64,
    pub support_size: usize,
    pub objective: f64,
}

fn gram_matrix<D: Dictionary + ?Sized>(a: &D, support: &[usize]) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = support.iter().map(|&j| a.column(j)).collect();
    let k = support.len();
    let mut g = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = dot(&cols[i], &cols[j]);
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    g
}

/// Factors `A_IᵀA_I` from scratch, adding a `1e-12·trace` ridge if needed.
/// The flag reports whether the ridge was used.
fn refactor<D: Dictionary + ?Sized>(a: &D, support: &[usize]) -> Result<(CholFactor, bool)> {
    if support.is_empty() {
        return Ok((CholFactor::empty(), false));
    }
    let mut g = gram_matrix(a, support);
    if let Ok(f) = CholFactor::factor(&g) {
        return Ok((f, false));
    }
    let ridge = 1e-12 * g.trace().max(f64::MIN_POSITIVE);
    for i in 0..support.len() {
        g.set(i, i, g.get(i, i) + ridge);
    }
    CholFactor::factor(&g)
        .map(|f| (f, true))
        .map_err(|_| L1Error::DegenerateSupport(format!("Gram matrix of {} columns is singular", support.len())))
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Solves `A_IᵀA_I d_I = sgn(c_I)`; entries off the support are zero.
pub fn update_direction<D: Dictionary + ?Sized>(state: &PathState, a: &D) -> Result<Vec<f64>> {
    update_direction_checked(state, a, HomotopyParams::default().refactor_tol)
}

fn update_direction_checked<D: Dictionary + ?Sized>(state: &PathState, a: &D, tol: f64) -> Result<Vec<f64>> {
    check_len("factor dimension (support size)", state.support.len(), state.chol.dim())?;
    let s: Vec<f64> = state.support.iter().map(|&i| sign(state.c[i])).collect();
    let d_active = state.chol.solve(&s)?;
    if d_active.iter().any(|v| !v.is_finite()) {
        return Err(L1Error::DegenerateSupport("non-finite update direction".into()));
    }
    // Gram residual ‖A_Iᵀ A_I d − s‖∞ guards against a drifted factor.
    if !state.support.is_empty() {
        let v = a.apply_support(&state.support, &d_active);
        let worst = state.support.iter().zip(&s).map(|(&j, sj)| (dot(&a.column(j), &v) - sj).abs()).fold(0.0, f64::max);
        if worst > tol {
            return Err(L1Error::DegenerateSupport(format!("direction residual {worst:e}")));
        }
    }
    let mut d = vec![0.0; a.ncols()];
    for (&j, dj) in state.support.iter().zip(d_active) {
        d[j] = dj;
    }
    Ok(d)
}

/// Step lengths at which an inactive correlation reaches `±λ` (γ⁺) or an
/// active coefficient reaches zero (γ⁻). Only strictly positive, finite
/// candidates count; an empty candidate set yields `+∞`.
pub fn breakpoint_gammas<D: Dictionary + ?Sized>(state: &PathState, d: &[f64], a: &D) -> Result<Breakpoints> {
    check_len("direction length", a.ncols(), d.len())?;
    let d_active: Vec<f64> = state.support.iter().map(|&j| d[j]).collect();
    let p = a.adjoint(&a.apply_support(&state.support, &d_active));
    Ok(gammas_from(state, d, &p, None, a.nrows()))
}

fn gammas_from(state: &PathState, d: &[f64], p: &[f64], skip: Option<usize>, max_support: usize) -> Breakpoints {
    let lambda = state.lambda;
    let floor = 1e-14 * lambda;
    let mut active = vec![false; state.c.len()];
    for &j in &state.support {
        active[j] = true;
    }

    let mut gamma_plus = f64::INFINITY;
    let mut i_plus = None;
    if state.support.len() < max_support {
        for i in 0..state.c.len() {
            if active[i] || Some(i) == skip {
                continue;
            }
            let (ci, pi) = (state.c[i], p[i]);
            for g in [(lambda - ci) / (1.0 - pi), (lambda + ci) / (1.0 + pi)] {
                if g.is_finite() && g > floor && g < gamma_plus {
                    gamma_plus = g;
                    i_plus = Some(i);
                }
            }
        }
    }

    let mut gamma_minus = f64::INFINITY;
    let mut i_minus = None;
    for &j in &state.support {
        if d[j] == 0.0 {
            continue;
        }
        let g = -state.x[j] / d[j];
        if g.is_finite() && g > floor && g < gamma_minus {
            gamma_minus = g;
            i_minus = Some(j);
        }
    }
    Breakpoints { gamma_plus, i_plus, gamma_minus, i_minus }
}

/// Computes the path from `‖Aᵀb‖∞` down to `config.lambda` (0 when unset),
/// calling `observer` after every breakpoint.
pub fn homotopy_path<D, F>(problem: &Problem<'_, D>, config: &SolverConfig, mut observer: F) -> Result<SolverResult>
where
    D: Dictionary + ?Sized,
    F: FnMut(&PathState),
{
    let target = config.lambda.unwrap_or(0.0);
    let params = &config.homotopy;
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let (a, b) = (problem.a, problem.b);
    let n = a.ncols();
    let objective = |x: &[f64], r: &[f64], lam: f64| 0.5 * dot(r, r) + lam * norm1(x);

    let x = vec![0.0; n];
    let mut r = b.to_vec();
    let c = a.adjoint(&r);
    let (i0, lambda0) =
        c.iter().enumerate().fold((0usize, 0.0f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best });
    monitor.initial(&x, objective(&x, &r, target), norm2(&r));

    if lambda0 <= target || lambda0 == 0.0 {
        return Ok(monitor.finish(x, 0, true));
    }

    let (chol, _) = refactor(a, &[i0])?;
    let mut state = PathState { x, support: vec![i0], lambda: lambda0, c, chol };
    let mut last_removed: Option<usize> = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iter {
        let d = match update_direction_checked(&state, a, params.refactor_tol) {
            Ok(d) => d,
            Err(L1Error::DegenerateSupport(_)) => {
                let (f, ridged) = refactor(a, &state.support)?;
                state.chol = f;
                if ridged {
                    monitor.warnings.push(format!("ridge added to Gram matrix at lambda {:e}", state.lambda));
                }
                // A ridged factor can never meet the residual check; accept it.
                update_direction_checked(&state, a, if ridged { f64::INFINITY } else { params.refactor_tol })?
            }
            Err(e) => return Err(e),
        };
        let d_active: Vec<f64> = state.support.iter().map(|&j| d[j]).collect();
        let p = a.adjoint(&a.apply_support(&state.support, &d_active));
        let bp = gammas_from(&state, &d, &p, last_removed, a.nrows());

        let to_target = state.lambda - target;
        let removal = bp.gamma_minus <= bp.gamma_plus * (1.0 + params.tie_tol);
        let step = bp.gamma_plus.min(bp.gamma_minus);
        // a breakpoint within rounding of the target is the target
        let (gamma, event) = if to_target <= step || to_target - step <= 1e-12 * lambda0 {
            (to_target, Event::Target)
        } else if removal {
            (bp.gamma_minus, Event::Remove(bp.i_minus.expect("finite gamma has an index")))
        } else {
            (bp.gamma_plus, Event::Add(bp.i_plus.expect("finite gamma has an index")))
        };

        for &j in &state.support {
            state.x[j] += gamma * d[j];
        }
        state.lambda = if matches!(event, Event::Target) { target } else { state.lambda - gamma };
        iterations += 1;

        last_removed = None;
        match event {
            Event::Target => {}
            Event::Remove(i) => {
                state.x[i] = 0.0;
                let pos = state.support.iter().position(|&j| j == i).expect("removed index is active");
                state.support.remove(pos);
                if state.chol.remove(pos).is_err() {
                    let (f, ridged) = refactor(a, &state.support)?;
                    state.chol = f;
                    if ridged {
                        monitor.warnings.push(format!("ridge added to Gram matrix at lambda {:e}", state.lambda));
                    }
                }
                last_removed = Some(i);
            }
            Event::Add(i) => {
                let col = a.column(i);
                let cross: Vec<f64> = state.support.iter().map(|&j| dot(&a.column(j), &col)).collect();
                state.support.push(i);
                if state.chol.append(&cross, dot(&col, &col)).is_err() {
                    let (f, ridged) = refactor(a, &state.support)?;
                    state.chol = f;
                    if ridged {
                        monitor.warnings.push(format!("ridge added to Gram matrix at lambda {:e}", state.lambda));
                    }
                }
            }
        }

        // exact correlations at the breakpoint
        let active_values: Vec<f64> = state.support.iter().map(|&j| state.x[j]).collect();
        let fit = a.apply_support(&state.support, &active_values);
        r = b.iter().zip(&fit).map(|(bi, fi)| bi - fi).collect();
        state.c = a.adjoint(&r);

        observer(&state);
        let obj = objective(&state.x, &r, state.lambda);
        let kkt = if state.lambda > 0.0 {
            Some(kkt_from_correlation(&state.x, &state.c, state.lambda) / state.lambda)
        } else {
            None
        };
        let fired = monitor.step(iterations, &state.x, obj, norm2(&r), kkt)?;

        if matches!(event, Event::Target) || state.lambda <= target {
            converged = true;
            break;
        }
        if fired {
            converged = true;
            break;
        }
        if norm2(&r) == 0.0 {
            converged = true;
            break;
        }
    }

    if converged && target > 0.0 {
        polish(&mut state, a, b, target);
    }
    Ok(monitor.finish(state.x, iterations, converged))
}

/// Re-solves the active coefficients from `A_IᵀA_I x_I = A_Iᵀb − λ s` and
/// keeps the result only if the signs and off-support bound still hold.
fn polish<D: Dictionary + ?Sized>(state: &mut PathState, a: &D, b: &[f64], lambda: f64) {
    if state.support.is_empty() {
        return;
    }
    let s: Vec<f64> = state.support.iter().map(|&j| sign(state.x[j])).collect();
    let rhs: Vec<f64> = state.support.iter().zip(&s).map(|(&j, sj)| dot(&a.column(j), b) - lambda * sj).collect();
    let Ok(xi) = state.chol.solve(&rhs) else { return };
    if xi.iter().zip(&s).any(|(v, sj)| v * sj <= 0.0 || !v.is_finite()) {
        return;
    }
    let mut x = vec![0.0; a.ncols()];
    for (&j, v) in state.support.iter().zip(&xi) {
        x[j] = *v;
    }
    let r: Vec<f64> = b.iter().zip(a.apply_support(&state.support, &xi)).map(|(bi, fi)| bi - fi).collect();
    let c = a.adjoint(&r);
    if kkt_from_correlation(&x, &c, lambda) <= kkt_from_correlation(&state.x, &state.c, lambda) {
        state.x = x;
        state.c = c;
    }
}

enum Event {
    Target,
    Add(usize),
    Remove(usize),
}

/// Solves to `config.lambda` (the equality-constrained minimum when unset).
pub fn homotopy_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    homotopy_path(problem, config, |_| {})
}

/// Like [`homotopy_solve`] but also returns every breakpoint.
pub fn homotopy_with_path<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    config: &SolverConfig,
) -> Result<(SolverResult, Vec<PathPoint>)> {
    let mut points = Vec::new();
    let result = homotopy_path(problem, config, |s| {
        let fit = problem.a.apply(&s.x);
        let rr: f64 = problem.b.iter().zip(&fit).map(|(bi, fi)| (bi - fi).powi(2)).sum();
        points.push(PathPoint {
            lambda: s.lambda,
            support_size: s.support.len(),
            objective: 0.5 * rr + s.lambda * norm1(&s.x),
        });
    })?;
    Ok((result, points))
}

/// Writes `lambda,support_size,objective` rows with a header.
pub fn write_path_csv<W: Write>(mut w: W, points: &[PathPoint]) -> std::io::Result<()> {
    writeln!(w, "lambda,support_size,objective")?;
    for p in points {
        writeln!(
            w,
            "{},{},{}",
            crate::bench::format_g17(p.lambda),
            p.support_size,
            crate::bench::format_g17(p.objective)
        )?;
    }
    Ok(())
}
