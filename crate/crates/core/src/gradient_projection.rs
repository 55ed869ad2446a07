//! Gradient projection (GPSR) on the split variable `z = [x₊; x₋] ≥ 0` and a
//! truncated-Newton interior-point method (TNIPM) on the barrier problem
//! `t(½‖Ax − b‖² + λΣu) − Σ log(u² − x²)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, L1Error, Result};
use crate::model::{kkt_from_correlation, Monitor, Problem, SolverConfig, SolverResult};
use crate::numerics::{dot, norm1, norm2, norm_inf, pcg_solve, CholFactor, DenseMatrix, Dictionary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpsrParams {
    /// Step used when the curvature along the direction vanishes.
    pub alpha_max: f64,
    pub max_halvings: usize,
}

impl Default for GpsrParams {
    fn default() -> Self {
        Self { alpha_max: 1e8, max_halvings: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TnipmParams {
    /// Barrier multiplier growth once a stage is centered.
    pub mu: f64,
    pub decrement_tol: f64,
    pub pcg_tol: f64,
    pub pcg_max_iter: usize,
    pub armijo: f64,
    pub max_line_search: usize,
    /// Re-solve the optimality system on the detected support at the end.
    pub polish: bool,
}

impl Default for TnipmParams {
    fn default() -> Self {
        Self {
            mu: 10.0,
            decrement_tol: 0.5,
            pcg_tol: 1e-8,
            pcg_max_iter: 500,
            armijo: 0.01,
            max_line_search: 50,
            polish: true,
        }
    }
}

/// Projected-gradient direction: a coordinate at its bound with a positive
/// gradient cannot move and is zeroed.
pub fn gpsr_direction(z: &[f64], grad: &[f64]) -> Result<Vec<f64>> {
    check_len("gradient length", z.len(), grad.len())?;
    Ok(z.iter().zip(grad).map(|(&zi, &gi)| if zi > 0.0 || gi < 0.0 { gi } else { 0.0 }).collect())
}

/// `gᵀg / gᵀBg` given both quadratic forms; capped when the curvature is
/// negligible.
pub fn step_from_curvature(gg: f64, gbg: f64, alpha_max: f64) -> f64 {
    if gbg <= 1e-14 * gg {
        alpha_max
    } else {
        (gg / gbg).min(alpha_max)
    }
}

/// Exact minimizing step of the quadratic along `−g`, with
/// `gᵀBg = ‖A(g₊ − g₋)‖²` computed without forming `B`.
pub fn gpsr_step_size<D: Dictionary + ?Sized>(g: &[f64], a: &D, alpha_max: f64) -> Result<f64> {
    let n = a.ncols();
    check_len("direction length (2n)", 2 * n, g.len())?;
    let diff: Vec<f64> = (0..n).map(|i| g[i] - g[n + i]).collect();
    let ad = a.apply(&diff);
    Ok(step_from_curvature(dot(g, g), dot(&ad, &ad), alpha_max))
}

fn split_gradient(c: &[f64], lambda: f64) -> Vec<f64> {
    let n = c.len();
    let mut g = Vec::with_capacity(2 * n);
    g.extend(c.iter().map(|ci| lambda - ci));
    g.extend(c.iter().map(|ci| lambda + ci));
    g
}

fn residual<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, x: &[f64]) -> Vec<f64> {
    problem.residual(x)
}

/// GPSR-Basic with projection and step halving.
pub fn gpsr_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    let params = &config.gpsr;
    let lambda = problem.resolve_lambda(config);
    if !(lambda > 0.0) {
        return Err(L1Error::InvalidArgument("gpsr needs lambda > 0".into()));
    }
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let a = problem.a;
    let n = a.ncols();

    let mut z = vec![0.0; 2 * n];
    let recombine = |z: &[f64]| -> Vec<f64> { (0..n).map(|i| z[i] - z[n + i]).collect() };
    let mut x = recombine(&z);
    let mut r = residual(problem, &x);
    let mut q = 0.5 * dot(&r, &r) + lambda * z.iter().sum::<f64>();
    monitor.initial(&x, q, norm2(&r));
    let mut c = a.adjoint(&r);

    let mut converged = false;
    let mut k = 0;
    loop {
        if kkt_from_correlation(&x, &c, lambda) <= config.tol * lambda {
            converged = true;
            break;
        }
        if k >= config.max_iter {
            break;
        }
        let grad = split_gradient(&c, lambda);
        let g = gpsr_direction(&z, &grad)?;
        let mut alpha = gpsr_step_size(&g, a, params.alpha_max)?;

        let mut accepted = None;
        for _ in 0..=params.max_halvings {
            let mut zn: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| (zi - alpha * gi).max(0.0)).collect();
            // cancel the common part of x₊ and x₋; never raises the objective
            for i in 0..n {
                let m = zn[i].min(zn[n + i]);
                zn[i] -= m;
                zn[n + i] -= m;
            }
            let xn = recombine(&zn);
            let rn = residual(problem, &xn);
            let qn = 0.5 * dot(&rn, &rn) + lambda * zn.iter().sum::<f64>();
            if qn <= q {
                accepted = Some((zn, xn, rn, qn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((zn, xn, rn, qn)) = accepted else {
            break;
        };
        k += 1;
        z = zn;
        x = xn;
        r = rn;
        q = qn;
        c = a.adjoint(&r);
        let kkt = kkt_from_correlation(&x, &c, lambda) / lambda;
        if monitor.step(k, &x, q, norm2(&r), Some(kkt))? {
            converged = true;
            break;
        }
    }
    Ok(monitor.finish(x, k, converged))
}

/// `x_S` from `A_SᵀA_S x_S = A_Sᵀb − λ s_S`, scattered into a full vector.
fn solve_on_support<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    support: &[usize],
    signs: &[f64],
    lambda: f64,
) -> Option<Vec<f64>> {
    let a = problem.a;
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
    let f = CholFactor::factor(&g).ok()?;
    let rhs: Vec<f64> = cols.iter().zip(signs).map(|(col, sj)| dot(col, problem.b) - lambda * sj).collect();
    let xs = f.solve(&rhs).ok()?;
    let mut cand = vec![0.0; a.ncols()];
    for (&j, v) in support.iter().zip(&xs) {
        cand[j] = *v;
    }
    Some(cand)
}

/// Recovers the exact minimizer from an approximate one by solving the
/// optimality system on a guessed support and repairing the guess: entries
/// that change sign leave, the worst violator of `|cᵢ| ≤ λ` enters. Starts
/// from the entries of `x` above successively finer relative thresholds and
/// returns the first candidate whose KKT residual is below `1e-9·λ`. Used to
/// remove the barrier's residual interior offset.
pub(crate) fn support_polish<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    x: &[f64],
    lambda: f64,
) -> Option<Vec<f64>> {
    let scale = norm_inf(x);
    if scale == 0.0 {
        return None;
    }
    let a = problem.a;
    let mut tried: Vec<Vec<usize>> = Vec::new();
    for rel in [1e-2, 1e-3, 1e-4, 1e-6, 1e-8] {
        let mut support: Vec<usize> = (0..x.len()).filter(|&i| x[i].abs() > rel * scale).collect();
        let mut signs: Vec<f64> = support.iter().map(|&j| x[j].signum()).collect();
        for _ in 0..4 * a.nrows().max(4) {
            if support.is_empty() || support.len() > a.nrows() || tried.contains(&support) {
                break;
            }
            tried.push(support.clone());
            let Some(cand) = solve_on_support(problem, &support, &signs, lambda) else { break };
            let flipped: Vec<usize> =
                support.iter().zip(&signs).filter(|(&j, &sj)| cand[j] * sj <= 0.0).map(|(&j, _)| j).collect();
            if !flipped.is_empty() {
                let keep: Vec<(usize, f64)> =
                    support.iter().zip(&signs).filter(|(j, _)| !flipped.contains(j)).map(|(&j, &s)| (j, s)).collect();
                support = keep.iter().map(|p| p.0).collect();
                signs = keep.iter().map(|p| p.1).collect();
                continue;
            }
            let c = a.adjoint(&problem.residual(&cand));
            if kkt_from_correlation(&cand, &c, lambda) <= 1e-9 * lambda {
                return Some(cand);
            }
            let worst = (0..c.len())
                .filter(|i| cand[*i] == 0.0)
                .max_by(|&i, &j| c[i].abs().total_cmp(&c[j].abs()))
                .filter(|&i| c[i].abs() > lambda);
            let Some(i) = worst else { break };
            support.push(i);
            signs.push(c[i].signum());
        }
    }
    None
}

struct Barrier<'p, 'a, D: ?Sized> {
    problem: &'p Problem<'a, D>,
    lambda: f64,
}

impl<D: Dictionary + ?Sized> Barrier<'_, '_, D> {
    fn interior(x: &[f64], u: &[f64]) -> bool {
        x.iter().zip(u).all(|(xi, ui)| xi.abs() < *ui)
    }

    /// `F_t(x, u)`; `None` outside the domain.
    fn value(&self, t: f64, x: &[f64], u: &[f64]) -> Option<f64> {
        if !Self::interior(x, u) {
            return None;
        }
        let r = self.problem.residual(x);
        let barrier: f64 = x.iter().zip(u).map(|(xi, ui)| -((ui + xi).ln() + (ui - xi).ln())).sum();
        Some(t * (0.5 * dot(&r, &r) + self.lambda * u.iter().sum::<f64>()) + barrier)
    }
}

/// Truncated-Newton interior-point method with a diagonally preconditioned
/// CG solve of the reduced Newton system.
pub fn tnipm_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    tnipm_solve_observed(problem, config, |_, _| {})
}

/// [`tnipm_solve`], calling `observer(x, u)` at every accepted interior point.
pub fn tnipm_solve_observed<D, F>(
    problem: &Problem<'_, D>,
    config: &SolverConfig,
    mut observer: F,
) -> Result<SolverResult>
where
    D: Dictionary + ?Sized,
    F: FnMut(&[f64], &[f64]),
{
    let params = &config.tnipm;
    let lambda = problem.resolve_lambda(config);
    if !(lambda > 0.0) {
        return Err(L1Error::InvalidArgument("tnipm needs lambda > 0".into()));
    }
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let a = problem.a;
    let n = a.ncols();
    let barrier = Barrier { problem, lambda };
    let col_sq: Vec<f64> = (0..n).map(|j| a.column_norm_sq(j)).collect();

    let mut x = vec![0.0; n];
    let mut u = vec![1.0; n];
    let mut t = 1.0 / lambda;
    let mut r = problem.residual(&x);
    let objective = |r: &[f64], x: &[f64]| 0.5 * dot(r, r) + lambda * norm1(x);
    monitor.initial(&x, objective(&r, &x), norm2(&r));

    let mut converged = false;
    let mut k = 0;
    while k < config.max_iter {
        let obj = objective(&r, &x);
        if 2.0 * n as f64 / t <= config.tol * (1.0 + obj) {
            converged = true;
            break;
        }
        // gradient and reduced Hessian of F_t
        let atr = a.adjoint(&r);
        let mut gx = vec![0.0; n];
        let mut gu = vec![0.0; n];
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        let mut d3 = vec![0.0; n];
        for i in 0..n {
            let q1 = 1.0 / (u[i] + x[i]);
            let q2 = 1.0 / (u[i] - x[i]);
            gx[i] = -t * atr[i] - q1 + q2;
            gu[i] = t * lambda - q1 - q2;
            let (p1, p2) = (q1 * q1, q2 * q2);
            d1[i] = p1 + p2;
            d2[i] = p1 - p2;
            d3[i] = 4.0 * p1 * p2 / (p1 + p2);
        }
        let rhs: Vec<f64> = (0..n).map(|i| -gx[i] + d2[i] * gu[i] / d1[i]).collect();
        let precond: Vec<f64> = (0..n).map(|i| t * col_sq[i] + d3[i]).collect();
        let op = |v: &[f64]| -> Vec<f64> {
            let atav = a.adjoint(&a.apply(v));
            atav.iter().zip(v).zip(&d3).map(|((h, vi), di)| t * h + di * vi).collect()
        };
        let sol = pcg_solve(op, &rhs, Some(&precond), params.pcg_tol, params.pcg_max_iter)?;
        let dx = sol.x;
        let du: Vec<f64> = (0..n).map(|i| -(gu[i] + d2[i] * dx[i]) / d1[i]).collect();
        let slope = dot(&gx, &dx) + dot(&gu, &du);
        let decrement = (-slope).max(0.0).sqrt();

        if decrement <= params.decrement_tol {
            t *= params.mu;
            continue;
        }

        let f0 = barrier.value(t, &x, &u).expect("iterate is interior");
        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..params.max_line_search {
            let xn: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + s * b).collect();
            let un: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + s * b).collect();
            if let Some(f) = barrier.value(t, &xn, &un) {
                if f <= f0 + params.armijo * s * slope {
                    accepted = Some((xn, un));
                    break;
                }
            }
            s *= 0.5;
        }
        let Some((xn, un)) = accepted else {
            if slope.abs() <= 1e-12 * f0.abs().max(1.0) {
                // no further progress is representable at this t
                t *= params.mu;
                continue;
            }
            return Err(L1Error::NumericalBreakdown(format!(
                "barrier line search failed at t = {t:e} (decrement {decrement:e})"
            )));
        };
        x = xn;
        u = un;
        observer(&x, &u);
        r = problem.residual(&x);
        k += 1;
        let obj = objective(&r, &x);
        let kkt =
            if monitor.wants_kkt() { Some(kkt_from_correlation(&x, &a.adjoint(&r), lambda) / lambda) } else { None };
        if monitor.step(k, &x, obj, norm2(&r), kkt)? {
            converged = true;
            break;
        }
    }

    if params.polish {
        if let Some(p) = support_polish(problem, &x, lambda) {
            let obj_p = {
                let rp = problem.residual(&p);
                objective(&rp, &p)
            };
            if obj_p <= objective(&r, &x) + 1e-12 * obj_p.abs() {
                x = p;
            }
        }
    }
    Ok(monitor.finish(x, k, converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemInstance;
    use crate::numerics::shrink;
    use crate::synth::gen_gaussian_dict;

    #[test]
    fn direction_examples() {
        assert_eq!(gpsr_direction(&[0.0, 1.0], &[-1.0, 2.0]).unwrap(), vec![-1.0, 2.0]);
        assert_eq!(gpsr_direction(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(gpsr_direction(&[2.0, 0.0], &[3.0, -4.0]).unwrap(), vec![3.0, -4.0]);
        assert!(gpsr_direction(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn step_examples() {
        // g = [1, 0], B = diag(2, 1): gᵀg = 1, gᵀBg = 2
        assert_eq!(step_from_curvature(1.0, 2.0, 1e8), 0.5);
        // g = [1, 1] lies in the null space of B for the split of a 1×1 A
        let a = DenseMatrix::diag(&[1.0]);
        assert_eq!(gpsr_step_size(&[1.0, 1.0], &a, 1e8).unwrap(), 1e8);
    }

    #[test]
    fn step_minimizes_line_quadratic() {
        let a = gen_gaussian_dict(6, 4, 3).unwrap();
        let g: Vec<f64> = (0..8).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let alpha = gpsr_step_size(&g, &a, 1e8).unwrap();
        let diff: Vec<f64> = (0..4).map(|i| g[i] - g[4 + i]).collect();
        let ad = a.matvec(&diff);
        // Q(z − αg) − Q(z) = −α gᵀg + ½α² gᵀBg along a fixed gradient g
        let phi = |s: f64| -s * dot(&g, &g) + 0.5 * s * s * dot(&ad, &ad);
        let best = (0..=20000).map(|i| i as f64 * 2.0 * alpha / 20000.0).fold((0.0, f64::INFINITY), |acc, s| {
            let v = phi(s);
            if v < acc.1 {
                (s, v)
            } else {
                acc
            }
        });
        assert!((best.0 - alpha).abs() <= 2.0 * alpha / 20000.0);
    }

    fn orthonormal() -> (ProblemInstance, Vec<f64>, f64) {
        let (s, c) = (0.6, 0.8);
        let a = DenseMatrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        let b = vec![1.5, 0.2];
        let lambda = 0.4;
        let x: Vec<f64> = a.matvec_t(&b).iter().map(|v| shrink(*v, lambda)).collect();
        (ProblemInstance::new(a, b).unwrap(), x, lambda)
    }

    #[test]
    fn gpsr_closed_form() {
        let (p, x_ref, lambda) = orthonormal();
        let r = gpsr_solve(&p.view(), &SolverConfig::default().with_lambda(lambda)).unwrap();
        assert!(r.converged);
        for (u, v) in r.x_star.iter().zip(&x_ref) {
            assert!((u - v).abs() < 1e-6);
        }
    }

    #[test]
    fn tnipm_closed_form() {
        let (p, x_ref, lambda) = orthonormal();
        let r = tnipm_solve(&p.view(), &SolverConfig::default().with_lambda(lambda)).unwrap();
        assert!(r.converged);
        for (u, v) in r.x_star.iter().zip(&x_ref) {
            assert!((u - v).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_data() {
        let p = ProblemInstance::new(DenseMatrix::identity(3), vec![0.0; 3]).unwrap();
        let cfg = SolverConfig::default().with_lambda(0.1);
        assert!(gpsr_solve(&p.view(), &cfg).unwrap().x_star.iter().all(|v| *v == 0.0));
        let r = tnipm_solve(&p.view(), &cfg).unwrap();
        assert!(norm_inf(&r.x_star) < 1e-6);
    }
}
