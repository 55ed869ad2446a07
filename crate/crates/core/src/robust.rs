//! Sparse error correction: the extended dictionary `[A, I]` for
//! observations with gross corruption, and solvers for the alignment
//! problem `b = Bw + e` with a tall, full-rank `B` and sparse `e`.

use serde::{Deserialize, Serialize};

use crate::alm::palm_solve_partial;
use crate::error::{check_len, L1Error, Result};
use crate::homotopy::homotopy_path;
use crate::model::{kkt_from_correlation, Monitor, Problem, SolverConfig, SolverResult, StopKind};
use crate::numerics::{dot, norm1, norm2, norm_inf, CholFactor, DenseMatrix, Dictionary};
use crate::shrinkage::{ist_solve_partial, ContinuationSchedule};
use crate::solver::Algorithm;

/// Implicit `[A, s·I]` of width `n + d`; the identity block is never stored.
#[derive(Debug, Clone, Copy)]
pub struct ExtendedDictionary<'a, D: ?Sized> {
    a: &'a D,
    scale: f64,
}

impl<'a, D: Dictionary + ?Sized> ExtendedDictionary<'a, D> {
    pub fn new(a: &'a D) -> Self {
        Self { a, scale: 1.0 }
    }

    /// Scales the identity block by `s`; penalizing `[x; e']` uniformly then
    /// weights `‖e‖₁` by `1/s` for `e = s·e'`.
    pub fn with_scale(a: &'a D, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(L1Error::InvalidArgument(format!("identity scale must be positive, got {scale}")));
        }
        Ok(Self { a, scale })
    }

    pub fn inner(&self) -> &D {
        self.a
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl<D: Dictionary + ?Sized> Dictionary for ExtendedDictionary<'_, D> {
    fn nrows(&self) -> usize {
        self.a.nrows()
    }

    fn ncols(&self) -> usize {
        self.a.ncols() + self.a.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.a.ncols();
        let mut out = self.a.apply(&x[..n]);
        for (o, e) in out.iter_mut().zip(&x[n..]) {
            *o += self.scale * e;
        }
        out
    }

    fn adjoint(&self, r: &[f64]) -> Vec<f64> {
        let mut out = self.a.adjoint(r);
        out.extend(r.iter().map(|v| self.scale * v));
        out
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let n = self.a.ncols();
        if j < n {
            self.a.column(j)
        } else {
            let mut c = vec![0.0; self.a.nrows()];
            c[j - n] = self.scale;
            c
        }
    }

    fn column_norm_sq(&self, j: usize) -> f64 {
        if j < self.a.ncols() {
            self.a.column_norm_sq(j)
        } else {
            self.scale * self.scale
        }
    }

    fn apply_support(&self, support: &[usize], values: &[f64]) -> Vec<f64> {
        let n = self.a.ncols();
        let (mut inner_s, mut inner_v) = (Vec::new(), Vec::new());
        let mut out_extra = Vec::new();
        for (&j, &v) in support.iter().zip(values) {
            if j < n {
                inner_s.push(j);
                inner_v.push(v);
            } else {
                out_extra.push((j - n, v));
            }
        }
        let mut out = self.a.apply_support(&inner_s, &inner_v);
        for (i, v) in out_extra {
            out[i] += self.scale * v;
        }
        out
    }

    fn weighted_gram(&self, w: &[f64]) -> DenseMatrix {
        let n = self.a.ncols();
        let mut g = self.a.weighted_gram(&w[..n]);
        for (i, wi) in w[n..].iter().enumerate() {
            g.set(i, i, g.get(i, i) + self.scale * self.scale * wi);
        }
        g
    }
}

/// Coefficients and error estimate of an extended-dictionary solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CabSolution {
    pub x: Vec<f64>,
    pub e: Vec<f64>,
    pub result: SolverResult,
}

/// Solves for `b ≈ Ax + e` with both `x` and `e` sparse, penalizing
/// `‖x‖₁ + weight·‖e‖₁`. The equality-form solvers (PDIPA, ALM, and
/// homotopy without a target λ) solve `min ‖x‖₁ + weight·‖e‖₁ s.t. Ax + e = b`.
pub fn cab_solve<D: Dictionary + ?Sized>(
    a: &D,
    b: &[f64],
    algo: Algorithm,
    config: &SolverConfig,
    weight: f64,
) -> Result<CabSolution> {
    check_len("length of b (rows of A)", a.nrows(), b.len())?;
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(L1Error::InvalidArgument(format!("error weight must be positive, got {weight}")));
    }
    let ext = ExtendedDictionary::with_scale(a, 1.0 / weight)?;
    let problem = Problem::new(&ext, b)?;
    let result = crate::solver::solve(algo, &problem, config)?;
    let n = a.ncols();
    let x = result.x_star[..n].to_vec();
    let e = result.x_star[n..].iter().map(|v| v * ext.scale()).collect();
    Ok(CabSolution { x, e, result })
}

/// `b = Bw + e` with tall, full-column-rank `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentProblem {
    pub basis: DenseMatrix,
    pub b: Vec<f64>,
    pub ground_truth_w: Option<Vec<f64>>,
    pub ground_truth_e: Option<Vec<f64>>,
}

impl AlignmentProblem {
    pub fn new(basis: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        check_len("length of b (rows of B)", basis.rows(), b.len())?;
        if basis.rows() <= basis.cols() {
            return Err(L1Error::InvalidArgument(format!("B must be tall, got {}x{}", basis.rows(), basis.cols())));
        }
        Ok(Self { basis, b, ground_truth_w: None, ground_truth_e: None })
    }

    pub fn with_ground_truth(mut self, w: Vec<f64>, e: Vec<f64>) -> Result<Self> {
        check_len("ground-truth w (columns of B)", self.basis.cols(), w.len())?;
        check_len("ground-truth e (rows of B)", self.basis.rows(), e.len())?;
        self.ground_truth_w = Some(w);
        self.ground_truth_e = Some(e);
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.basis.rows()
    }

    pub fn m(&self) -> usize {
        self.basis.cols()
    }

    /// `½‖b − Bw − e‖² + λ‖e‖₁`
    pub fn objective(&self, w: &[f64], e: &[f64], lambda: f64) -> f64 {
        let r = self.residual(w, e);
        0.5 * dot(&r, &r) + lambda * norm1(e)
    }

    pub fn residual(&self, w: &[f64], e: &[f64]) -> Vec<f64> {
        let bw = self.basis.matvec(w);
        (0..self.d()).map(|i| self.b[i] - bw[i] - e[i]).collect()
    }

    /// `max(‖Bᵀr‖∞, KKT violation of e against r)` with `r = b − Bw − e`.
    pub fn kkt_residual(&self, w: &[f64], e: &[f64], lambda: f64) -> (f64, f64) {
        let r = self.residual(w, e);
        (norm_inf(&self.basis.matvec_t(&r)), kkt_from_correlation(e, &r, lambda))
    }
}

/// Thin QR of a tall matrix by twice-iterated modified Gram-Schmidt.
struct ThinQr {
    /// Orthonormal columns, stored as `m` vectors of length `d`.
    q: Vec<Vec<f64>>,
    /// Upper triangular, `B = QR`.
    r: DenseMatrix,
}

impl ThinQr {
    fn new(basis: &DenseMatrix) -> Result<Self> {
        let m = basis.cols();
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut r = DenseMatrix::zeros(m, m);
        for j in 0..m {
            let mut v = basis.column(j);
            let original = norm2(&v);
            for _ in 0..2 {
                for (i, qi) in q.iter().enumerate() {
                    let c = dot(qi, &v);
                    r.set(i, j, r.get(i, j) + c);
                    for (vk, qk) in v.iter_mut().zip(qi) {
                        *vk -= c * qk;
                    }
                }
            }
            let nv = norm2(&v);
            if !(nv > 1e-10 * original.max(f64::MIN_POSITIVE)) {
                return Err(L1Error::IllConditioned(format!("B is rank deficient at column {j}")));
            }
            r.set(j, j, nv);
            v.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
        }
        Ok(Self { q, r })
    }

    /// `B†v = R⁻¹Qᵀv`
    fn pinv_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.q.iter().map(|qi| dot(qi, v)).collect();
        for i in (0..out.len()).rev() {
            let tail: f64 = (i + 1..out.len()).map(|j| self.r.get(i, j) * out[j]).sum();
            out[i] = (out[i] - tail) / self.r.get(i, i);
        }
        out
    }

    /// `v − QQᵀv`
    fn perp(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        for qi in &self.q {
            let c = dot(qi, v);
            for (o, qk) in out.iter_mut().zip(qi) {
                *o -= c * qk;
            }
        }
        out
    }
}

/// The projector `I − BB†` onto the orthogonal complement of `range(B)`,
/// as a symmetric dictionary.
struct Perp<'q> {
    qr: &'q ThinQr,
    d: usize,
}

impl Dictionary for Perp<'_> {
    fn nrows(&self) -> usize {
        self.d
    }

    fn ncols(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.qr.perp(x)
    }

    fn adjoint(&self, r: &[f64]) -> Vec<f64> {
        self.qr.perp(r)
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.d];
        e[j] = 1.0;
        self.qr.perp(&e)
    }

    fn column_norm_sq(&self, j: usize) -> f64 {
        1.0 - self.qr.q.iter().map(|qi| qi[j] * qi[j]).sum::<f64>()
    }
}

/// Estimate returned by the alignment solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentSolution {
    pub w: Vec<f64>,
    pub e: Vec<f64>,
    pub lambda: f64,
    /// `½‖b − Bw − e‖² + λ‖e‖₁` at the returned point.
    pub objective: f64,
    pub result: SolverResult,
}

/// Scale at which `e = 0` stops being optimal: `‖(I − BB†)b‖∞`.
pub fn alignment_lambda_max(prob: &AlignmentProblem) -> Result<f64> {
    let qr = ThinQr::new(&prob.basis)?;
    Ok(norm_inf(&qr.perp(&prob.b)))
}

/// `config.lambda`, or `1e-2·‖(I − BB†)b‖∞`.
pub fn alignment_lambda(prob: &AlignmentProblem, config: &SolverConfig) -> Result<f64> {
    match config.lambda {
        Some(l) => Ok(l),
        None => Ok(crate::model::DEFAULT_LAMBDA_SCALE * alignment_lambda_max(prob)?),
    }
}

fn finish(prob: &AlignmentProblem, w: Vec<f64>, e: Vec<f64>, lambda: f64, result: SolverResult) -> AlignmentSolution {
    let objective = prob.objective(&w, &e, lambda);
    AlignmentSolution { w, e, lambda, objective, result }
}

/// Solves the optimality system on a fixed error support:
/// `w = (B_cᵀB_c)⁻¹(B_cᵀb_c + λB_Sᵀs_S)` with `c` the complement of `S`,
/// then `e_S = b_S − B_S w − λs_S`. Returns the candidate only if it
/// satisfies the sign and bound conditions.
fn alignment_polish(prob: &AlignmentProblem, e: &[f64], lambda: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let scale = norm_inf(e);
    let (d, m) = (prob.d(), prob.m());
    let bmat = &prob.basis;
    let mut tried: Option<Vec<usize>> = None;
    let thresholds: &[f64] = if scale == 0.0 { &[1.0] } else { &[1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8] };
    for &rel in thresholds {
        let support: Vec<usize> = (0..d).filter(|&i| e[i].abs() > rel * scale).collect();
        if tried.as_ref() == Some(&support) || d - support.len() <= m {
            continue;
        }
        tried = Some(support.clone());
        let mut in_s = vec![false; d];
        support.iter().for_each(|&i| in_s[i] = true);
        let s: Vec<f64> = (0..d).map(|i| if in_s[i] { e[i].signum() } else { 0.0 }).collect();
        let mut g = DenseMatrix::zeros(m, m);
        let mut rhs = vec![0.0; m];
        for i in 0..d {
            let row = bmat.row(i);
            let coeff = if in_s[i] { lambda * s[i] } else { prob.b[i] };
            for p in 0..m {
                rhs[p] += row[p] * coeff;
                if !in_s[i] {
                    for q in p..m {
                        g.set(p, q, g.get(p, q) + row[p] * row[q]);
                    }
                }
            }
        }
        for p in 0..m {
            for q in 0..p {
                g.set(p, q, g.get(q, p));
            }
        }
        let Ok(f) = CholFactor::factor(&g) else { continue };
        let Ok(w) = f.solve(&rhs) else { continue };
        let bw = bmat.matvec(&w);
        let mut cand = vec![0.0; d];
        let mut ok = true;
        for i in 0..d {
            if in_s[i] {
                cand[i] = prob.b[i] - bw[i] - lambda * s[i];
                ok &= cand[i] * s[i] > 0.0;
            }
        }
        if !ok {
            continue;
        }
        let (kw, ke) = prob.kkt_residual(&w, &cand, lambda);
        if kw <= 1e-9 * norm_inf(&prob.b).max(1.0) && ke <= 1e-9 * lambda {
            return Some((w, cand));
        }
    }
    None
}

/// Log-barrier Newton method on `(w, e, u)` with `|eᵢ| < uᵢ`. The `e`/`u`
/// blocks are diagonal, so each Newton step needs only an `m × m` solve.
pub fn align_gp_solve(prob: &AlignmentProblem, config: &SolverConfig) -> Result<AlignmentSolution> {
    let lambda = alignment_lambda(prob, config)?;
    if !(lambda > 0.0) {
        return Err(L1Error::InvalidArgument("alignment barrier method needs lambda > 0".into()));
    }
    let params = &config.tnipm;
    let qr = ThinQr::new(&prob.basis)?;
    let mut monitor = Monitor::start(config, prob.ground_truth_e.as_deref())?;
    let (d, m) = (prob.d(), prob.m());
    let bmat = &prob.basis;

    let mut w = qr.pinv_apply(&prob.b);
    let mut e = vec![0.0; d];
    let mut u = vec![1.0; d];
    let mut r = prob.residual(&w, &e);
    let mut t = 1.0 / lambda;
    let value = |t: f64, r: &[f64], e: &[f64], u: &[f64]| -> Option<f64> {
        if e.iter().zip(u).any(|(ei, ui)| ei.abs() >= *ui) {
            return None;
        }
        let barrier: f64 = e.iter().zip(u).map(|(ei, ui)| -((ui + ei).ln() + (ui - ei).ln())).sum();
        Some(t * (0.5 * dot(r, r) + lambda * u.iter().sum::<f64>()) + barrier)
    };
    monitor.initial(&e, prob.objective(&w, &e, lambda), norm2(&r));

    let mut converged = false;
    let mut k = 0;
    while k < config.max_iter {
        let obj = 0.5 * dot(&r, &r) + lambda * norm1(&e);
        if 2.0 * d as f64 / t <= config.tol * (1.0 + obj) {
            converged = true;
            break;
        }
        let gw: Vec<f64> = bmat.matvec_t(&r).iter().map(|v| -t * v).collect();
        let mut ge = vec![0.0; d];
        let mut gu = vec![0.0; d];
        let mut d1 = vec![0.0; d];
        let mut d2 = vec![0.0; d];
        let mut h = vec![0.0; d];
        for i in 0..d {
            let q1 = 1.0 / (u[i] + e[i]);
            let q2 = 1.0 / (u[i] - e[i]);
            ge[i] = -t * r[i] - q1 + q2;
            gu[i] = t * lambda - q1 - q2;
            let (p1, p2) = (q1 * q1, q2 * q2);
            d1[i] = p1 + p2;
            d2[i] = p1 - p2;
            h[i] = t + 4.0 * p1 * p2 / (p1 + p2);
        }
        // e-block after eliminating u: diagonal h; reduced gradient ge'
        let ge_red: Vec<f64> = (0..d).map(|i| ge[i] - d2[i] * gu[i] / d1[i]).collect();
        // Schur complement in w: Bᵀ diag(t − t²/h) B
        let weights: Vec<f64> = h.iter().map(|hi| t - t * t / hi).collect();
        let mut s = DenseMatrix::zeros(m, m);
        for i in 0..d {
            let row = bmat.row(i);
            for p in 0..m {
                let rp = weights[i] * row[p];
                for q in p..m {
                    s.set(p, q, s.get(p, q) + rp * row[q]);
                }
            }
        }
        for p in 0..m {
            for q in 0..p {
                s.set(p, q, s.get(q, p));
            }
        }
        let chol =
            CholFactor::factor(&s).map_err(|e| L1Error::IllConditioned(format!("alignment Schur complement: {e}")))?;
        let scaled: Vec<f64> = (0..d).map(|i| ge_red[i] / h[i]).collect();
        let rhs: Vec<f64> = bmat.matvec_t(&scaled).iter().zip(&gw).map(|(v, g)| -g + t * v).collect();
        let dw = chol.solve(&rhs)?;
        let bdw = bmat.matvec(&dw);
        let de: Vec<f64> = (0..d).map(|i| (-ge_red[i] - t * bdw[i]) / h[i]).collect();
        let du: Vec<f64> = (0..d).map(|i| -(gu[i] + d2[i] * de[i]) / d1[i]).collect();
        let slope = dot(&gw, &dw) + dot(&ge, &de) + dot(&gu, &du);
        let decrement = (-slope).max(0.0).sqrt();
        if decrement <= params.decrement_tol {
            t *= params.mu;
            continue;
        }
        let f0 = value(t, &r, &e, &u).expect("interior iterate");
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..params.max_line_search {
            let wn: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + step * b).collect();
            let en: Vec<f64> = e.iter().zip(&de).map(|(a, b)| a + step * b).collect();
            let un: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + step * b).collect();
            let rn: Vec<f64> = (0..d).map(|i| r[i] - step * (bdw[i] + de[i])).collect();
            if let Some(f) = value(t, &rn, &en, &un) {
                if f <= f0 + params.armijo * step * slope {
                    accepted = Some((wn, en, un));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((wn, en, un)) = accepted else {
            if slope.abs() <= 1e-12 * f0.abs().max(1.0) {
                t *= params.mu;
                continue;
            }
            return Err(L1Error::NumericalBreakdown(format!("alignment line search failed at t = {t:e}")));
        };
        w = wn;
        e = en;
        u = un;
        r = prob.residual(&w, &e);
        k += 1;
        let obj = 0.5 * dot(&r, &r) + lambda * norm1(&e);
        if monitor.step(k, &e, obj, norm2(&r), None)? {
            converged = true;
            break;
        }
    }
    if params.polish {
        if let Some((wp, ep)) = alignment_polish(prob, &e, lambda) {
            if prob.objective(&wp, &ep, lambda) <= prob.objective(&w, &e, lambda) * (1.0 + 1e-12) {
                w = wp;
                e = ep;
            }
        }
    }
    let result = monitor.finish(e.clone(), k, converged);
    Ok(finish(prob, w, e, lambda, result))
}

/// Homotopy on `e` for `min ½‖(I − BB†)(b − e)‖² + λ‖e‖₁`, which is the
/// alignment objective with `w` eliminated; `w` is recovered from
/// `Bᵀ(b − Bw − e) = 0`. The path starts at `e = 0`, `w = B†b`,
/// `λ₀ = ‖b − Bw‖∞` and stops at the alignment λ (pass `lambda = 0` for
/// `min ‖e‖₁ s.t. b = Bw + e`).
pub fn align_homotopy_solve(prob: &AlignmentProblem, config: &SolverConfig) -> Result<AlignmentSolution> {
    let qr = ThinQr::new(&prob.basis)?;
    let lambda = alignment_lambda(prob, config)?;
    let perp = Perp { qr: &qr, d: prob.d() };
    let problem = Problem::new(&perp, &prob.b)?.with_ground_truth(prob.ground_truth_e.as_deref())?;
    let cfg = config.clone().with_lambda(lambda);
    if norm_inf(&qr.perp(&prob.b)) <= 1e-12 * norm_inf(&prob.b) {
        // b already lies in range(B)
        let mut monitor = Monitor::start(&cfg, prob.ground_truth_e.as_deref())?;
        let e = vec![0.0; prob.d()];
        monitor.initial(&e, 0.0, 0.0);
        let w = qr.pinv_apply(&prob.b);
        return Ok(finish(prob, w, e.clone(), lambda, monitor.finish(e, 0, true)));
    }
    let result = homotopy_path(&problem, &cfg, |_| {})?;
    let e = result.x_star.clone();
    let rhs: Vec<f64> = prob.b.iter().zip(&e).map(|(bi, ei)| bi - ei).collect();
    let w = qr.pinv_apply(&rhs);
    Ok(finish(prob, w, e, lambda, result))
}

/// IST on `[w; e]` over `[B, I]`: `w` takes plain gradient steps, `e` is
/// soft-thresholded.
pub fn align_ist_solve(prob: &AlignmentProblem, config: &SolverConfig) -> Result<AlignmentSolution> {
    let lambda = alignment_lambda(prob, config)?;
    if !(lambda > 0.0) {
        return Err(L1Error::InvalidArgument("alignment IST needs lambda > 0".into()));
    }
    let m = prob.m();
    let ext = ExtendedDictionary::new(&prob.basis);
    let problem = Problem::new(&ext, &prob.b)?;
    let start = (config.ist.lambda_start_scale * alignment_lambda_max(prob)?).max(lambda);
    let schedule = ContinuationSchedule::new(start, config.ist.beta, lambda)?;
    let mut cfg = config.clone();
    if matches!(cfg.stopping, Some(ref r) if r.kind == StopKind::GroundTruthDistance) {
        cfg.stopping = None;
    }
    let result = ist_solve_partial(&problem, &schedule, &cfg, m)?;
    let w = result.x_star[..m].to_vec();
    let e = result.x_star[m..].to_vec();
    Ok(finish(prob, w, e, lambda, result))
}

/// Primal augmented Lagrangian on `min ‖e‖₁ s.t. Bw + e = b`.
pub fn align_palm_solve(prob: &AlignmentProblem, config: &SolverConfig) -> Result<AlignmentSolution> {
    let m = prob.m();
    ThinQr::new(&prob.basis)?;
    let ext = ExtendedDictionary::new(&prob.basis);
    let problem = Problem::new(&ext, &prob.b)?;
    let mut cfg = config.clone();
    if matches!(cfg.stopping, Some(ref r) if r.kind == StopKind::GroundTruthDistance) {
        cfg.stopping = None;
    }
    let result = palm_solve_partial(&problem, &cfg, m)?;
    let w = result.x_star[..m].to_vec();
    let e = result.x_star[m..].to_vec();
    let lambda = config.lambda.unwrap_or(0.0);
    Ok(finish(prob, w, e, lambda, result))
}

/// Alignment backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignMethod {
    Gp,
    Homotopy,
    Ist,
    Palm,
}

impl std::str::FromStr for AlignMethod {
    type Err = L1Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gp" | "tnipm" => Ok(AlignMethod::Gp),
            "homotopy" => Ok(AlignMethod::Homotopy),
            "ist" => Ok(AlignMethod::Ist),
            "palm" => Ok(AlignMethod::Palm),
            other => {
                Err(L1Error::InvalidArgument(format!("unknown alignment method '{other}' (gp, homotopy, ist, palm)")))
            }
        }
    }
}

impl AlignMethod {
    pub fn name(self) -> &'static str {
        match self {
            AlignMethod::Gp => "gp",
            AlignMethod::Homotopy => "homotopy",
            AlignMethod::Ist => "ist",
            AlignMethod::Palm => "palm",
        }
    }
}

pub fn align_solve(prob: &AlignmentProblem, method: AlignMethod, config: &SolverConfig) -> Result<AlignmentSolution> {
    match method {
        AlignMethod::Gp => align_gp_solve(prob, config),
        AlignMethod::Homotopy => align_homotopy_solve(prob, config),
        AlignMethod::Ist => align_ist_solve(prob, config),
        AlignMethod::Palm => align_palm_solve(prob, config),
    }
}
