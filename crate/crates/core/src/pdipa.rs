//! Primal-dual interior-point method for `min ‖x‖₁ s.t. Ax = b`, solved as
//! the linear program `min 1ᵀx̃ s.t. [A, −A]x̃ = b, x̃ ≥ 0`.
//!
//! Infeasible-start path following: residuals of both equality blocks enter
//! the Newton right-hand side, centering uses `μ̂ = σ·xᵀz/(2n)`, and steps
//! stop short of the boundary by a fixed fraction.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, L1Error, Result};
use crate::model::{Monitor, Problem, SolverConfig, SolverResult};
use crate::numerics::{dot, norm1, norm2, CholFactor, DenseMatrix, Dictionary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PdipaParams {
    pub sigma: f64,
    pub step_factor: f64,
    /// Relative primal and dual infeasibility accepted at termination.
    pub feasibility_tol: f64,
    /// Upper bound on the relative duality gap at termination; the solver
    /// uses `min(gap_tol, 1e-2·tol)`.
    pub gap_tol: f64,
}

impl Default for PdipaParams {
    fn default() -> Self {
        Self { sigma: 0.1, step_factor: 0.99, feasibility_tol: 1e-8, gap_tol: 1e-6 }
    }
}

/// Primal, dual and slack iterate of the LP.
#[derive(Debug, Clone, PartialEq)]
pub struct PdipaState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub mu: f64,
}

impl PdipaState {
    /// The all-ones interior start with zero multipliers.
    pub fn initial(n: usize, d: usize) -> Self {
        Self { x: vec![1.0; n], y: vec![0.0; d], z: vec![1.0; n], mu: 1.0 }
    }

    /// `xᵀz / len`
    pub fn duality_measure(&self) -> f64 {
        dot(&self.x, &self.z) / self.x.len() as f64
    }
}

/// Newton direction of the perturbed KKT system.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: Vec<f64>,
}

/// The LP constraint operator and its Schur complement `M D Mᵀ`.
trait LpOperator {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn adjoint(&self, y: &[f64]) -> Vec<f64>;
    fn schur(&self, d: &[f64]) -> DenseMatrix;
}

/// `[A, −A]` without materializing the second block.
struct Split<'a, D: ?Sized>(&'a D);

impl<D: Dictionary + ?Sized> LpOperator for Split<'_, D> {
    fn width(&self) -> usize {
        2 * self.0.ncols()
    }

    fn height(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.0.ncols();
        let diff: Vec<f64> = (0..n).map(|i| x[i] - x[n + i]).collect();
        self.0.apply(&diff)
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let aty = self.0.adjoint(y);
        let mut out = aty.clone();
        out.extend(aty.iter().map(|v| -v));
        out
    }

    fn schur(&self, d: &[f64]) -> DenseMatrix {
        let n = self.0.ncols();
        let w: Vec<f64> = (0..n).map(|i| d[i] + d[n + i]).collect();
        self.0.weighted_gram(&w)
    }
}

struct Plain<'a>(&'a DenseMatrix);

impl LpOperator for Plain<'_> {
    fn width(&self) -> usize {
        self.0.cols()
    }

    fn height(&self) -> usize {
        self.0.rows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.matvec(x)
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.0.matvec_t(y)
    }

    fn schur(&self, d: &[f64]) -> DenseMatrix {
        self.0.weighted_gram(d)
    }
}

fn factor_schur(m: &DenseMatrix) -> Result<CholFactor> {
    if let Ok(f) = CholFactor::factor(m) {
        return Ok(f);
    }
    let mut ridged = m.clone();
    let ridge = 1e-12 * m.trace().max(f64::MIN_POSITIVE);
    for i in 0..m.rows() {
        ridged.set(i, i, m.get(i, i) + ridge);
    }
    CholFactor::factor(&ridged).map_err(|e| L1Error::IllConditioned(format!("Schur complement: {e}")))
}

fn newton_step<O: LpOperator>(state: &PdipaState, op: &O, b: &[f64], c: &[f64], mu_hat: f64) -> Result<NewtonStep> {
    let n = op.width();
    let aty = op.adjoint(&state.y);
    let r_p: Vec<f64> = b.iter().zip(op.apply(&state.x)).map(|(bi, ai)| bi - ai).collect();
    let r_d: Vec<f64> = (0..n).map(|i| c[i] - aty[i] - state.z[i]).collect();
    let r_c: Vec<f64> = (0..n).map(|i| mu_hat - state.x[i] * state.z[i]).collect();

    let d: Vec<f64> = state.x.iter().zip(&state.z).map(|(x, z)| x / z).collect();
    // dx = Z⁻¹(r_c − X r_d) + D Mᵀ dy
    let base: Vec<f64> = (0..n).map(|i| (r_c[i] - state.x[i] * r_d[i]) / state.z[i]).collect();
    let rhs: Vec<f64> = r_p.iter().zip(op.apply(&base)).map(|(p, q)| p - q).collect();
    let chol = factor_schur(&op.schur(&d))?;
    let dy = chol.solve(&rhs)?;
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(L1Error::IllConditioned("non-finite dual direction".into()));
    }
    let atdy = op.adjoint(&dy);
    let dx: Vec<f64> = (0..n).map(|i| base[i] + d[i] * atdy[i]).collect();
    let dz: Vec<f64> = (0..n).map(|i| r_d[i] - atdy[i]).collect();
    Ok(NewtonStep { dx, dy, dz })
}

/// Newton direction for the LP with an explicit constraint matrix `a_ext`
/// and cost `c`, targeting the centering value `mu_hat`.
pub fn newton_kkt_step(
    state: &PdipaState,
    a_ext: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    mu_hat: f64,
) -> Result<NewtonStep> {
    check_len("primal length (columns of A_ext)", a_ext.cols(), state.x.len())?;
    check_len("slack length", a_ext.cols(), state.z.len())?;
    check_len("dual length (rows of A_ext)", a_ext.rows(), state.y.len())?;
    check_len("cost length", a_ext.cols(), c.len())?;
    check_len("rhs length", a_ext.rows(), b.len())?;
    if state.x.iter().chain(&state.z).any(|v| !(*v > 0.0)) {
        return Err(L1Error::InvalidArgument("state must be strictly interior".into()));
    }
    newton_step(state, &Plain(a_ext), b, c, mu_hat)
}

fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter().zip(dv).filter(|(_, d)| **d < 0.0).map(|(vi, di)| -vi / di).fold(f64::INFINITY, f64::min)
}

/// Solution of a standard-form LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub state: PdipaState,
    pub iterations: usize,
    pub converged: bool,
}

struct LpRun {
    state: PdipaState,
    iterations: usize,
    converged: bool,
}

fn run_lp<O, F>(op: &O, b: &[f64], c: &[f64], config: &SolverConfig, mut on_iter: F) -> Result<LpRun>
where
    O: LpOperator,
    F: FnMut(usize, &PdipaState) -> Result<bool>,
{
    let params = &config.pdipa;
    let n = op.width();
    let mut state = PdipaState::initial(n, op.height());
    state.mu = state.duality_measure();
    let bnorm = norm2(b).max(1.0);
    let cnorm = norm2(c).max(1.0);
    let gap_tol = params.gap_tol.min(1e-2 * config.tol);

    let mut k = 0;
    let mut converged = false;
    loop {
        let ax = op.apply(&state.x);
        let primal_inf = norm2(&b.iter().zip(&ax).map(|(u, v)| u - v).collect::<Vec<_>>()) / bnorm;
        let aty = op.adjoint(&state.y);
        let dual_inf = norm2(&(0..n).map(|i| c[i] - aty[i] - state.z[i]).collect::<Vec<_>>()) / cnorm;
        let cx = dot(c, &state.x);
        // xᵀz equals the gap at feasibility and does not carry the
        // rounding floor of the primal residual
        let gap = (cx - dot(b, &state.y)).abs().min(dot(&state.x, &state.z));
        if primal_inf <= params.feasibility_tol
            && dual_inf <= params.feasibility_tol
            && gap <= gap_tol * (1.0 + cx.abs())
        {
            converged = true;
            break;
        }
        if k >= config.max_iter {
            break;
        }

        let mu = state.duality_measure();
        let step = newton_step(&state, op, b, c, params.sigma * mu)?;
        let ap = (params.step_factor * max_step(&state.x, &step.dx)).min(1.0);
        let ad = (params.step_factor * max_step(&state.z, &step.dz)).min(1.0);
        let take = |s: &PdipaState, ap: f64, ad: f64| PdipaState {
            x: s.x.iter().zip(&step.dx).map(|(v, d)| v + ap * d).collect(),
            y: s.y.iter().zip(&step.dy).map(|(v, d)| v + ad * d).collect(),
            z: s.z.iter().zip(&step.dz).map(|(v, d)| v + ad * d).collect(),
            mu: 0.0,
        };
        let mut next = take(&state, ap, ad);
        if next.duality_measure() >= mu {
            // safeguard: common, halved step until the measure decreases
            let mut alpha = ap.min(ad);
            for _ in 0..40 {
                next = take(&state, alpha, alpha);
                if next.duality_measure() < mu {
                    break;
                }
                alpha *= 0.5;
            }
            if next.duality_measure() >= mu {
                // stalled at rounding level
                break;
            }
        }
        if next.x.iter().chain(&next.z).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(L1Error::NumericalBreakdown(format!("iterate left the interior at iteration {}", k + 1)));
        }
        next.mu = next.duality_measure();
        state = next;
        k += 1;
        if on_iter(k, &state)? {
            converged = true;
            break;
        }
    }
    Ok(LpRun { state, iterations: k, converged })
}

/// Solves `min cᵀx s.t. Ax = b, x ≥ 0`.
pub fn lp_solve(a: &DenseMatrix, b: &[f64], c: &[f64], config: &SolverConfig) -> Result<LpSolution> {
    lp_solve_observed(a, b, c, config, |_| {})
}

/// [`lp_solve`], calling `observer` with every accepted iterate.
pub fn lp_solve_observed<F>(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    config: &SolverConfig,
    mut observer: F,
) -> Result<LpSolution>
where
    F: FnMut(&PdipaState),
{
    check_len("rhs length (rows of A)", a.rows(), b.len())?;
    check_len("cost length (columns of A)", a.cols(), c.len())?;
    config.validate()?;
    let run = run_lp(&Plain(a), b, c, config, |_, s| {
        observer(s);
        Ok(false)
    })?;
    Ok(LpSolution { state: run.state, iterations: run.iterations, converged: run.converged })
}

/// Equality-constrained ℓ1 minimization.
pub fn pdipa_solve<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, config: &SolverConfig) -> Result<SolverResult> {
    let mut monitor = Monitor::start(config, problem.ground_truth)?;
    let op = Split(problem.a);
    let n = problem.n();
    let c = vec![1.0; 2 * n];
    let recombine = |s: &PdipaState| -> Vec<f64> { (0..n).map(|i| s.x[i] - s.x[n + i]).collect() };

    let start = PdipaState::initial(2 * n, problem.d());
    let x0 = recombine(&start);
    monitor.initial(&x0, norm1(&start.x), norm2(&problem.residual(&x0)));

    let run = run_lp(&op, problem.b, &c, config, |k, s| {
        let x = recombine(s);
        let res = norm2(&problem.residual(&x));
        monitor.step(k, &x, norm1(&s.x), res, None)
    })?;
    let x = recombine(&run.state);
    Ok(monitor.finish(x, run.iterations, run.converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemInstance;

    /// Dense solve of the full 3-block Newton system with Gaussian elimination.
    fn dense_kkt(state: &PdipaState, a: &DenseMatrix, b: &[f64], c: &[f64], mu_hat: f64) -> Vec<f64> {
        let (d, n) = (a.rows(), a.cols());
        let size = 2 * n + d;
        let mut m = vec![vec![0.0; size + 1]; size];
        let ax = a.matvec(&state.x);
        let aty = a.matvec_t(&state.y);
        // rows: A dx = b − Ax
        for i in 0..d {
            for j in 0..n {
                m[i][j] = a.get(i, j);
            }
            m[i][size] = b[i] - ax[i];
        }
        // Aᵀ dy + dz = c − Aᵀy − z
        for j in 0..n {
            for i in 0..d {
                m[d + j][n + i] = a.get(i, j);
            }
            m[d + j][n + d + j] = 1.0;
            m[d + j][size] = c[j] - aty[j] - state.z[j];
        }
        // Z dx + X dz = μ̂ − xz
        for j in 0..n {
            m[d + n + j][j] = state.z[j];
            m[d + n + j][n + d + j] = state.x[j];
            m[d + n + j][size] = mu_hat - state.x[j] * state.z[j];
        }
        for col in 0..size {
            let piv = (col..size).max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs())).unwrap();
            m.swap(col, piv);
            for row in 0..size {
                if row != col {
                    let f = m[row][col] / m[col][col];
                    for k in col..=size {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
        (0..size).map(|i| m[i][size] / m[i][i]).collect()
    }

    #[test]
    fn newton_step_matches_dense_kkt() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        let state = PdipaState { x: vec![0.7, 1.3], y: vec![0.2], z: vec![0.5, 1.1], mu: 0.0 };
        let c = [1.0, 1.0];
        let b = [1.0];
        let step = newton_kkt_step(&state, &a, &b, &c, 0.05).unwrap();
        let dense = dense_kkt(&state, &a, &b, &c, 0.05);
        let ours: Vec<f64> = step.dx.iter().chain(&step.dy).chain(&step.dz).copied().collect();
        for (u, v) in ours.iter().zip(&dense) {
            assert!((u - v).abs() < 1e-12, "{ours:?} vs {dense:?}");
        }
    }

    #[test]
    fn newton_step_restores_primal_feasibility() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, -1.0, 3.0]]).unwrap();
        let state = PdipaState::initial(3, 2);
        let b = [4.0, -2.0];
        let step = newton_kkt_step(&state, &a, &b, &[1.0; 3], 0.1).unwrap();
        let adx = a.matvec(&step.dx);
        let ax = a.matvec(&state.x);
        for i in 0..2 {
            assert!((adx[i] - (b[i] - ax[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn centered_feasible_state_has_zero_complementarity_move() {
        // x = z = 1, y = 0 with c = 1 is dual feasible; b = A x makes it primal feasible
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let state = PdipaState::initial(2, 1);
        let b = a.matvec(&state.x);
        let step = newton_kkt_step(&state, &a, &b, &[1.0, 1.0], 1.0).unwrap();
        assert!(step.dx.iter().chain(&step.dy).chain(&step.dz).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn lp_vertex_example() {
        // vertices of {x ≥ 0, x₁ + 2x₂ = 2}: (2, 0) costs 2, (0, 1) costs 1
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let sol = lp_solve(&a, &[2.0], &[1.0, 1.0], &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.state.x[0].abs() < 1e-7 && (sol.state.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn scalar_l1_problem() {
        let p = ProblemInstance::new(DenseMatrix::from_rows(&[vec![1.0]]).unwrap(), vec![1.0]).unwrap();
        let r = pdipa_solve(&p.view(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.x_star[0] - 1.0).abs() < 1e-8);
    }
}
