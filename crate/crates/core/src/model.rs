//! Problem instances, solver configuration, stopping rules, result records
//! and optimality certificates shared by all solvers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::alm::{DalmParams, PalmParams};
use crate::error::{check_len, L1Error, Result};
use crate::gradient_projection::{GpsrParams, TnipmParams};
use crate::homotopy::HomotopyParams;
use crate::numerics::{dist2, norm1, norm2, norm_inf, relative_error, sub, DenseMatrix, Dictionary};
use crate::pdipa::PdipaParams;
use crate::shrinkage::{FistaParams, IstParams};

/// Scale of the default Lagrange multiplier relative to `‖Aᵀb‖∞`.
pub const DEFAULT_LAMBDA_SCALE: f64 = 1e-2;

/// An owned instance of `b = A x` with optional ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub ground_truth: Option<Vec<f64>>,
    pub noise_sigma: Option<f64>,
    /// Set when `A` has more rows than columns.
    pub overdetermined: bool,
}

impl ProblemInstance {
    /// Builds an underdetermined (or square) instance.
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() > a.cols() {
            return Err(L1Error::InvalidArgument(format!(
                "A is {}x{} (more rows than columns); use new_overdetermined",
                a.rows(),
                a.cols()
            )));
        }
        Self::build(a, b, false)
    }

    pub fn new_overdetermined(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        Self::build(a, b, true)
    }

    fn build(a: DenseMatrix, b: Vec<f64>, overdetermined: bool) -> Result<Self> {
        check_len("length of b (rows of A)", a.rows(), b.len())?;
        if b.iter().any(|v| !v.is_finite()) {
            return Err(L1Error::InvalidArgument("b has non-finite entries".into()));
        }
        Ok(Self { a, b, ground_truth: None, noise_sigma: None, overdetermined })
    }

    pub fn with_ground_truth(mut self, x0: Vec<f64>) -> Result<Self> {
        check_len("length of ground truth (columns of A)", self.a.cols(), x0.len())?;
        self.ground_truth = Some(x0);
        Ok(self)
    }

    pub fn with_noise_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(L1Error::InvalidArgument(format!("noise sigma must be non-negative, got {sigma}")));
        }
        self.noise_sigma = Some(sigma);
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn view(&self) -> Problem<'_, DenseMatrix> {
        Problem { a: &self.a, b: &self.b, ground_truth: self.ground_truth.as_deref() }
    }
}

/// Borrowed problem data over any dictionary; what the solvers consume.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a, D: ?Sized> {
    pub a: &'a D,
    pub b: &'a [f64],
    pub ground_truth: Option<&'a [f64]>,
}

impl<'a, D: Dictionary + ?Sized> Problem<'a, D> {
    pub fn new(a: &'a D, b: &'a [f64]) -> Result<Self> {
        check_len("length of b (rows of A)", a.nrows(), b.len())?;
        Ok(Self { a, b, ground_truth: None })
    }

    pub fn with_ground_truth(mut self, x0: Option<&'a [f64]>) -> Result<Self> {
        if let Some(x0) = x0 {
            check_len("length of ground truth (columns of A)", self.a.ncols(), x0.len())?;
        }
        self.ground_truth = x0;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn d(&self) -> usize {
        self.a.nrows()
    }

    /// `b − A x`
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        sub(self.b, &self.a.apply(x))
    }

    /// `‖Aᵀb‖∞`, the smallest λ for which `x = 0` is optimal.
    pub fn lambda_max(&self) -> f64 {
        norm_inf(&self.a.adjoint(self.b))
    }

    /// The configured λ, or `1e-2·‖Aᵀb‖∞` when unset.
    pub fn resolve_lambda(&self, config: &SolverConfig) -> f64 {
        config.lambda.unwrap_or_else(|| DEFAULT_LAMBDA_SCALE * self.lambda_max())
    }
}

/// Quantity monitored by a [`StoppingRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopKind {
    /// `|F(x_k) − F(x_{k−1})| / |F(x_{k−1})|`
    RelativeObjective,
    /// `‖x_k − x_{k−1}‖₂ / ‖x_{k−1}‖₂`
    RelativeEstimate,
    /// `‖x_k − x₀‖₂ / ‖x₀‖₂` against the known ground truth
    GroundTruthDistance,
    /// `kkt_residual(x_k) / λ`
    KktResidual,
}

impl std::str::FromStr for StopKind {
    type Err = L1Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative-objective" => Ok(StopKind::RelativeObjective),
            "relative-estimate" => Ok(StopKind::RelativeEstimate),
            "ground-truth-distance" => Ok(StopKind::GroundTruthDistance),
            "kkt-residual" => Ok(StopKind::KktResidual),
            other => Err(L1Error::InvalidArgument(format!("unknown stopping rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub kind: StopKind,
    pub threshold: f64,
}

impl StoppingRule {
    pub fn new(kind: StopKind, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(L1Error::InvalidArgument(format!("stopping threshold must be positive, got {threshold}")));
        }
        Ok(Self { kind, threshold })
    }

    /// Default rule for interactive solves.
    pub fn solve_default() -> Self {
        Self { kind: StopKind::RelativeEstimate, threshold: 1e-6 }
    }

    /// Default rule for counting successes in simulations.
    pub fn benchmark_default() -> Self {
        Self { kind: StopKind::GroundTruthDistance, threshold: 1e-3 }
    }
}

/// Shared solver settings plus the per-algorithm constants.
///
/// A solver reports `converged = true` when either its own certificate test
/// at `tol` passes or the optional `stopping` rule fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Lagrange multiplier of `½‖b − Ax‖² + λ‖x‖₁`; `None` selects the
    /// default `1e-2·‖Aᵀb‖∞` (homotopy: the target λ, `None` means 0).
    pub lambda: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub stopping: Option<StoppingRule>,
    pub pdipa: PdipaParams,
    pub gpsr: GpsrParams,
    pub tnipm: TnipmParams,
    pub homotopy: HomotopyParams,
    pub ist: IstParams,
    pub fista: FistaParams,
    pub palm: PalmParams,
    pub dalm: DalmParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: None,
            tol: 1e-6,
            max_iter: 5000,
            stopping: None,
            pdipa: PdipaParams::default(),
            gpsr: GpsrParams::default(),
            tnipm: TnipmParams::default(),
            homotopy: HomotopyParams::default(),
            ist: IstParams::default(),
            fista: FistaParams::default(),
            palm: PalmParams::default(),
            dalm: DalmParams::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(L1Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(L1Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(L1Error::InvalidArgument(format!("lambda must be non-negative, got {l}")));
            }
        }
        if let Some(rule) = &self.stopping {
            StoppingRule::new(rule.kind, rule.threshold)?;
        }
        Ok(())
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_stopping(mut self, rule: StoppingRule) -> Self {
        self.stopping = Some(rule);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub residual_norm: f64,
    pub support_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_star: Vec<f64>,
    pub iterations: usize,
    pub wall_time_seconds: f64,
    pub converged: bool,
    pub trace: Vec<TraceEntry>,
    /// Non-fatal conditions met during the solve (e.g. a regularized Gram matrix).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `½‖b − Ax‖₂² + λ‖x‖₁`
pub fn objective(x: &[f64], problem: &ProblemInstance, lambda: f64) -> Result<f64> {
    objective_of(&problem.view(), x, lambda)
}

pub fn objective_of<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, x: &[f64], lambda: f64) -> Result<f64> {
    check_len("length of x (columns of A)", problem.n(), x.len())?;
    let r = problem.residual(x);
    Ok(0.5 * norm2(&r).powi(2) + lambda * norm1(x))
}

/// Largest violation of the optimality condition `Aᵀ(b − Ax) ∈ λ∂‖x‖₁`.
///
/// Zero exactly at minimizers of `½‖b − Ax‖² + λ‖x‖₁`.
pub fn kkt_residual(x: &[f64], problem: &ProblemInstance, lambda: f64) -> Result<f64> {
    kkt_residual_of(&problem.view(), x, lambda)
}

pub fn kkt_residual_of<D: Dictionary + ?Sized>(problem: &Problem<'_, D>, x: &[f64], lambda: f64) -> Result<f64> {
    check_len("length of x (columns of A)", problem.n(), x.len())?;
    let c = problem.a.adjoint(&problem.residual(x));
    Ok(kkt_from_correlation(x, &c, lambda))
}

/// KKT violation given the correlation `c = Aᵀ(b − Ax)`.
pub fn kkt_from_correlation(x: &[f64], c: &[f64], lambda: f64) -> f64 {
    x.iter()
        .zip(c)
        .map(|(&xi, &ci)| {
            if xi > 0.0 {
                (ci - lambda).abs()
            } else if xi < 0.0 {
                (ci + lambda).abs()
            } else {
                (ci.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Values a stopping rule inspects at one iteration.
#[derive(Debug, Clone, Copy)]
pub struct Progress<'a> {
    pub x_prev: Option<&'a [f64]>,
    pub x: &'a [f64],
    pub objective_prev: Option<f64>,
    pub objective: f64,
    /// `kkt_residual / λ`, when the solver has it.
    pub kkt_relative: Option<f64>,
}

/// Whether `rule`'s quantity has fallen below its threshold.
pub fn check_stop(progress: &Progress<'_>, rule: &StoppingRule, ground_truth: Option<&[f64]>) -> Result<bool> {
    let value = match rule.kind {
        StopKind::RelativeObjective => {
            let prev = progress
                .objective_prev
                .ok_or_else(|| L1Error::InvalidArgument("relative-objective rule needs two trace entries".into()))?;
            let change = (progress.objective - prev).abs();
            if change == 0.0 {
                0.0
            } else {
                change / prev.abs()
            }
        }
        StopKind::RelativeEstimate => {
            let prev = progress
                .x_prev
                .ok_or_else(|| L1Error::InvalidArgument("relative-estimate rule needs two trace entries".into()))?;
            let change = dist2(progress.x, prev);
            if change == 0.0 {
                0.0
            } else {
                change / norm2(prev)
            }
        }
        StopKind::GroundTruthDistance => {
            let truth = ground_truth
                .ok_or_else(|| L1Error::InvalidArgument("ground-truth-distance rule without ground truth".into()))?;
            check_len("ground truth length", progress.x.len(), truth.len())?;
            relative_error(progress.x, truth)
        }
        StopKind::KktResidual => progress
            .kkt_relative
            .ok_or_else(|| L1Error::InvalidArgument("kkt-residual rule needs a KKT value".into()))?,
    };
    Ok(value <= rule.threshold)
}

/// Bookkeeping shared by the iterative solvers: the trace, the previous
/// iterate for relative rules, and the wall clock.
pub(crate) struct Monitor<'a> {
    rule: Option<StoppingRule>,
    truth: Option<&'a [f64]>,
    trace: Vec<TraceEntry>,
    prev_x: Vec<f64>,
    prev_objective: f64,
    started: Instant,
    pub warnings: Vec<String>,
}

impl<'a> Monitor<'a> {
    pub fn start(config: &SolverConfig, truth: Option<&'a [f64]>) -> Result<Self> {
        config.validate()?;
        if let Some(rule) = &config.stopping {
            if rule.kind == StopKind::GroundTruthDistance && truth.is_none() {
                return Err(L1Error::InvalidArgument("ground-truth-distance rule without ground truth".into()));
            }
        }
        Ok(Self {
            rule: config.stopping,
            truth,
            trace: Vec::new(),
            prev_x: Vec::new(),
            prev_objective: f64::NAN,
            started: Instant::now(),
            warnings: Vec::new(),
        })
    }

    pub fn wants_kkt(&self) -> bool {
        matches!(self.rule, Some(StoppingRule { kind: StopKind::KktResidual, .. }))
    }

    /// Records the starting point (iteration 0).
    pub fn initial(&mut self, x: &[f64], objective: f64, residual_norm: f64) {
        self.push(0, x, objective, residual_norm);
        self.prev_x = x.to_vec();
        self.prev_objective = objective;
    }

    fn push(&mut self, iteration: usize, x: &[f64], objective: f64, residual_norm: f64) {
        self.trace.push(TraceEntry {
            iteration,
            objective,
            residual_norm,
            support_size: crate::numerics::support_size(x),
        });
    }

    /// Records iteration `k` and reports whether the configured rule fires.
    pub fn step(
        &mut self,
        iteration: usize,
        x: &[f64],
        objective: f64,
        residual_norm: f64,
        kkt_relative: Option<f64>,
    ) -> Result<bool> {
        self.push(iteration, x, objective, residual_norm);
        let fired = match &self.rule {
            Some(rule) => {
                let progress = Progress {
                    x_prev: Some(&self.prev_x),
                    x,
                    objective_prev: Some(self.prev_objective),
                    objective,
                    kkt_relative,
                };
                if rule.kind == StopKind::KktResidual && kkt_relative.is_none() {
                    false
                } else {
                    check_stop(&progress, rule, self.truth)?
                }
            }
            None => false,
        };
        self.prev_x.clear();
        self.prev_x.extend_from_slice(x);
        self.prev_objective = objective;
        Ok(fired)
    }

    pub fn finish(self, x_star: Vec<f64>, iterations: usize, converged: bool) -> SolverResult {
        SolverResult {
            x_star,
            iterations,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            converged,
            trace: self.trace,
            warnings: self.warnings,
        }
    }
}
